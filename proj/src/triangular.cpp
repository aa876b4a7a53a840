#include "whitneyopt/triangular.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "whitneyopt/error.hpp"

namespace whitneyopt {

bool TriangularSystem::is_free(std::size_t var) const {
  return std::binary_search(free_vars.begin(), free_vars.end(), var);
}

const Polynomial* TriangularSystem::polynomial_for(std::size_t var) const {
  for (const auto& p : polynomials) {
    if (main_variable(p) == var) return &p;
  }
  return nullptr;
}

TriangularSystem validate_triangular(std::vector<Polynomial> polys, const VariableOrder& order) {
  std::map<std::size_t, Polynomial> by_mvar;
  for (auto& p : polys) {
    if (!(p.order() == order)) {
      throw Error(ErrorCode::kOrderMismatch,
                  "polynomial " + p.to_string() + " uses a different variable order");
    }
    auto mvar = main_variable(p);
    if (!mvar) {
      throw Error(ErrorCode::kConstantMember,
                  "triangular set member " + p.to_string() + " is constant");
    }
    if (auto it = by_mvar.find(*mvar); it != by_mvar.end()) {
      throw Error(ErrorCode::kDuplicateMvar,
                  "main variable '" + order.name(*mvar) + "' is shared by " +
                      it->second.to_string() + " and " + p.to_string());
    }
    by_mvar.emplace(*mvar, std::move(p));
  }

  TriangularSystem sys{order, {}, {}, {}};
  for (auto& [var, p] : by_mvar) {
    sys.algebraic_vars.push_back(var);
    sys.polynomials.push_back(std::move(p));
  }
  for (std::size_t v = 0; v < order.size(); ++v) {
    if (!by_mvar.contains(v)) sys.free_vars.push_back(v);
  }
  return sys;
}

VariableOrder WhitneyPartition::retained_order() const {
  std::vector<std::string> names;
  names.reserve(retained.size());
  for (auto v : retained) names.push_back(order().name(v));
  return VariableOrder(std::move(names));
}

std::vector<Polynomial> WhitneyPartition::reduced_constraints() const {
  const VariableOrder target = retained_order();
  std::vector<std::optional<std::size_t>> index_map(order().size());
  for (std::size_t i = 0; i < retained.size(); ++i) index_map[retained[i]] = i;
  std::vector<Polynomial> out;
  out.reserve(g_star.size());
  for (const auto& p : g_star) out.push_back(p.remap(target, index_map));
  return out;
}

namespace {

// Unique real root, continuous in the parameters: linear, or odd degree with
// a constant leading coefficient.
bool has_guaranteed_unique_root(const Polynomial& p) {
  const auto dec = decompose(p);
  return dec.main_degree == 1 || (dec.main_degree % 2 == 1 && dec.initial.is_constant());
}

WhitneyPartition build_partition(const TriangularSystem& sys, std::vector<std::size_t> eliminated) {
  const auto& order = sys.order;
  std::set<std::size_t> seen;
  WhitneyPartition part{sys, eliminated, {}, {}, {}};
  for (auto v : eliminated) {
    if (v >= order.size()) {
      throw Error(ErrorCode::kInvalidArgument, "eliminated variable index out of range");
    }
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::kNotEliminable,
                  "variable '" + order.name(v) + "' is listed for elimination twice");
    }
    const Polynomial* p = sys.polynomial_for(v);
    if (p == nullptr) {
      throw Error(ErrorCode::kNotEliminable,
                  "variable '" + order.name(v) + "' is free and cannot be eliminated");
    }
    part.g_circ.push_back(*p);
  }

  // g_circ[j] may only use eliminated variables already solved (index <= j).
  for (std::size_t j = 0; j < eliminated.size(); ++j) {
    for (std::size_t later = j + 1; later < eliminated.size(); ++later) {
      if (part.g_circ[j].involves(eliminated[later])) {
        throw Error(ErrorCode::kNotEliminable,
                    "constraint " + part.g_circ[j].to_string() + " for '" +
                        order.name(eliminated[j]) + "' depends on '" +
                        order.name(eliminated[later]) + "', which is eliminated later");
      }
    }
  }

  for (const auto& p : sys.polynomials) {
    const auto mvar = *main_variable(p);
    if (seen.contains(mvar)) continue;
    for (auto v : eliminated) {
      if (p.involves(v)) {
        throw Error(ErrorCode::kNotEliminable,
                    "retained constraint " + p.to_string() + " involves eliminated variable '" +
                        order.name(v) + "'");
      }
    }
    part.g_star.push_back(p);
  }
  if (part.g_star.empty()) {
    throw Error(ErrorCode::kEmptyGstar,
                "every constraint was eliminated; no reduced constraint remains");
  }
  for (std::size_t v = 0; v < order.size(); ++v) {
    if (!seen.contains(v)) part.retained.push_back(v);
  }
  return part;
}

}  // namespace

WhitneyPartition whitney_partition(const TriangularSystem& sys,
                                   const std::optional<std::vector<std::size_t>>& eliminate) {
  if (eliminate) return build_partition(sys, *eliminate);

  const std::size_t n = sys.order.size();
  const std::size_t target = std::min(2 * sys.manifold_dim() + 1, n);
  std::vector<std::size_t> chosen;
  std::set<std::size_t> chosen_set;
  for (auto it = sys.algebraic_vars.rbegin(); it != sys.algebraic_vars.rend(); ++it) {
    if (n - chosen.size() <= target) break;
    // Keep at least one constraint in g_star.
    if (chosen.size() + 1 >= sys.polynomials.size()) break;
    const Polynomial& p = *sys.polynomial_for(*it);
    if (!has_guaranteed_unique_root(p)) break;
    bool cascade_ok = true;
    for (const auto& other : sys.polynomials) {
      const auto mvar = *main_variable(other);
      if (mvar == *it || chosen_set.contains(mvar)) continue;
      if (other.involves(*it)) cascade_ok = false;
    }
    if (!cascade_ok) break;
    chosen.push_back(*it);
    chosen_set.insert(*it);
  }
  std::sort(chosen.begin(), chosen.end());
  return build_partition(sys, std::move(chosen));
}

// ---------------------------------------------------------------------------
// Linear case

Eigen::VectorXd LinearTriangularForm::solve_x(const Eigen::VectorXd& u) const {
  return a22.triangularView<Eigen::Upper>().solve(b2 - a23 * u);
}

Eigen::VectorXd LinearTriangularForm::solve_y(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& u) const {
  return a11.triangularView<Eigen::Upper>().solve(b1 - a12 * x - a13 * u);
}

LinearTriangularForm linear_whitney(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    std::size_t m) {
  const auto k = static_cast<std::size_t>(a.rows());
  if (static_cast<std::size_t>(a.cols()) != m + k) {
    throw Error(ErrorCode::kInvalidArgument, "A must have m + k columns");
  }
  if (static_cast<std::size_t>(b.size()) != k) {
    throw Error(ErrorCode::kInvalidArgument, "b must have k entries");
  }
  if (k <= m + 1) {
    throw Error(ErrorCode::kInvalidArgument, "linear reduction requires k > m + 1");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(a);
  if (static_cast<std::size_t>(rank_check.rank()) < k) {
    throw Error(ErrorCode::kRankDeficient, "A does not have full row rank");
  }

  const auto ki = static_cast<Eigen::Index>(k);
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ny = ki - mi - 1;
  const auto nx = mi + 1;

  // Row operations only: Q^T applied to A keeps the solution set.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.leftCols(ki));
  const Eigen::MatrixXd qt = qr.householderQ().transpose();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  const double scale = r.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ki; ++i) {
    if (std::abs(r(i, i)) <= static_cast<double>(k) * Eigen::NumTraits<double>::epsilon() * scale) {
      throw Error(ErrorCode::kRankDeficient,
                  "the [y x] column block is singular; reorder the coordinates");
    }
  }
  const Eigen::MatrixXd au = qt * a.rightCols(mi);
  const Eigen::VectorXd qb = qt * b;

  LinearTriangularForm form;
  form.a11 = r.topLeftCorner(ny, ny);
  form.a12 = r.block(0, ny, ny, nx);
  form.a13 = au.topRows(ny);
  form.a22 = r.bottomRightCorner(nx, nx);
  form.a23 = au.bottomRows(nx);
  form.b1 = qb.head(ny);
  form.b2 = qb.tail(nx);
  return form;
}

}  // namespace whitneyopt
