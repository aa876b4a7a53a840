#include "whitneyopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "whitneyopt/error.hpp"
#include "whitneyopt/univariate.hpp"

namespace whitneyopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

struct JacobianSvd {
  Matrix pseudoinverse;
  Matrix null_basis;
};

// Singular values below max(rows, cols) * eps * sigma_max count as zero.
JacobianSvd decompose_jacobian(const Matrix& jac) {
  const auto rows = jac.rows();
  const auto cols = jac.cols();
  if (rows == 0) {
    return {Matrix::Zero(cols, 0), Matrix::Identity(cols, cols)};
  }
  if (rows > cols) {
    throw Error(ErrorCode::kNotRegular, "more constraints than coordinates");
  }
  if (!jac.allFinite()) {
    throw Error(ErrorCode::kNotRegular, "Jacobian has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(rows, cols)) * kEps * sigma(0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  if (rank < rows) {
    std::ostringstream msg;
    msg << "Jacobian has numerical rank " << rank << " but " << rows << " constraints";
    throw Error(ErrorCode::kNotRegular, msg.str());
  }
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  Matrix pinv = v.leftCols(rank) * sigma.head(rank).cwiseInverse().asDiagonal() *
                u.leftCols(rank).transpose();
  return {std::move(pinv), v.rightCols(cols - rank)};
}

}  // namespace

void ProjectionConfig::validate() const {
  if (!(residual_tol > 0) || max_iters <= 0 || !(oracle_radius > 0) ||
      !(divergence_factor > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "projection settings must all be positive");
  }
}

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet::ConstraintSet(VariableOrder order, std::vector<Polynomial> polys)
    : order_(std::move(order)), polys_(std::move(polys)) {
  const std::size_t d = order_.size();
  for (const auto& p : polys_) {
    if (!(p.order() == order_)) {
      throw Error(ErrorCode::kOrderMismatch, "constraint " + p.to_string() +
                                                 " uses a different variable order");
    }
    values_.emplace_back(p);
    for (std::size_t j = 0; j < d; ++j) {
      const Polynomial dj = partial_derivative(p, j);
      gradient_.emplace_back(dj);
      for (std::size_t k = 0; k < d; ++k) hessian_.emplace_back(partial_derivative(dj, k));
    }
  }
}

ConstraintSet::ConstraintSet(std::vector<Polynomial> polys)
    : ConstraintSet(
          [&]() {
            if (polys.empty()) {
              throw Error(ErrorCode::kInvalidArgument,
                          "cannot infer a variable order from an empty constraint list");
            }
            return polys.front().order();
          }(),
          std::move(polys)) {}

ConstraintSet ConstraintSet::reduced(const WhitneyPartition& part) {
  return ConstraintSet(part.retained_order(), part.reduced_constraints());
}

Vector ConstraintSet::residuals(const Vector& z) const {
  Vector r(static_cast<Eigen::Index>(count()));
  for (std::size_t i = 0; i < count(); ++i) r(static_cast<Eigen::Index>(i)) = values_[i](as_span(z));
  return r;
}

double ConstraintSet::max_residual(const Vector& z) const {
  double worst = 0.0;
  for (const auto& g : values_) {
    const double v = std::abs(g(as_span(z)));
    if (!(v <= worst)) worst = v;  // propagates NaN
  }
  return worst;
}

Matrix ConstraintSet::jacobian(const Vector& z) const {
  const std::size_t d = dimension();
  Matrix jac(static_cast<Eigen::Index>(count()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < count(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          gradient_[i * d + j](as_span(z));
    }
  }
  return jac;
}

Matrix ConstraintSet::hessian(std::size_t c, const Vector& z) const {
  const std::size_t d = dimension();
  Matrix h(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          hessian_[(c * d + j) * d + k](as_span(z));
    }
  }
  return h;
}

Matrix jacobian(const ConstraintSet& g, const ReducedPoint& p) { return g.jacobian(p.coords); }

// ---------------------------------------------------------------------------
// Frames and projection

Matrix regular_pseudoinverse(const Matrix& jac) { return decompose_jacobian(jac).pseudoinverse; }

TangentFrame tangent_frame(const ConstraintSet& g, const ReducedPoint& p) {
  const Matrix jac = g.jacobian(p.coords);
  auto svd = decompose_jacobian(jac);

  const auto m = svd.null_basis.cols();
  const double orth_err =
      m > 0 ? (svd.null_basis.transpose() * svd.null_basis - Matrix::Identity(m, m)).cwiseAbs().maxCoeff()
            : 0.0;
  const double jac_norm = jac.size() ? jac.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  const double null_err =
      jac.size() && m ? (jac * svd.null_basis).cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  if ((m > 0 && orth_err > 1e-12) || null_err > 1e-10 * (1.0 + jac_norm)) {
    throw Error(ErrorCode::kNotRegular, "tangent basis failed its orthonormality checks");
  }
  return TangentFrame{p, std::move(svd.null_basis), std::move(svd.pseudoinverse)};
}

ProjectionResult project_to_manifold(const ConstraintSet& g, const TangentFrame& frame,
                                     const Vector& w, const ProjectionConfig& cfg) {
  if (w.size() != frame.tangent_basis.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "tangent coordinates have the wrong length");
  }
  const Vector q0 = frame.base.coords + frame.tangent_basis * w;
  Vector q = q0;
  Vector r = g.residuals(q);
  const double initial = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  const double blowup = cfg.divergence_factor * std::max(initial, cfg.residual_tol);

  for (int n = 0;; ++n) {
    const double res = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(res) || !q.allFinite()) {
      return {ProjectionStatus::kDiverged, std::nullopt, n, res};
    }
    if (res <= cfg.residual_tol) {
      return {ProjectionStatus::kConverged, ReducedPoint{q}, n, res};
    }
    if (res > blowup) return {ProjectionStatus::kDiverged, std::nullopt, n, res};
    if (n >= cfg.max_iters) return {ProjectionStatus::kIterationLimit, std::nullopt, n, res};
    q -= frame.pseudoinverse * r;
    if ((q - q0).norm() > cfg.oracle_radius) {
      return {ProjectionStatus::kLeftOracleRadius, std::nullopt, n + 1, res};
    }
    r = g.residuals(q);
  }
}

// ---------------------------------------------------------------------------
// Lift

Lifter::Lifter(const WhitneyPartition& part)
    : part_(std::make_shared<const WhitneyPartition>(part)) {
  for (std::size_t j = 0; j < part_->g_circ.size(); ++j) {
    const auto y = part_->eliminated[j];
    const auto& p = part_->g_circ[j];
    std::vector<Term> terms;
    for (const auto& [m, c] : p.terms()) {
      Term t{c.get_d(), m.degree(y), {}};
      for (const auto& [var, e] : m.exponents()) {
        if (var != y) t.powers.emplace_back(static_cast<std::uint32_t>(var), e);
      }
      terms.push_back(std::move(t));
    }
    cascade_.push_back(std::move(terms));
    degrees_.push_back(p.degree(y));
  }
}

AmbientPoint Lifter::operator()(const ReducedPoint& p, const std::optional<Vector>& warm,
                                const ProjectionConfig& cfg) const {
  const auto& part = *part_;
  if (static_cast<std::size_t>(p.coords.size()) != part.retained.size()) {
    throw Error(ErrorCode::kInvalidArgument, "reduced point has the wrong dimension");
  }
  if (warm && static_cast<std::size_t>(warm->size()) != part.eliminated.size()) {
    throw Error(ErrorCode::kInvalidArgument, "warm start has the wrong dimension");
  }
  Vector z = Vector::Zero(static_cast<Eigen::Index>(part.order().size()));
  for (std::size_t i = 0; i < part.retained.size(); ++i) {
    z(static_cast<Eigen::Index>(part.retained[i])) = p.coords(static_cast<Eigen::Index>(i));
  }

  std::vector<double> coeffs;
  for (std::size_t j = 0; j < cascade_.size(); ++j) {
    const auto y = part.eliminated[j];
    coeffs.assign(degrees_[j] + 1, 0.0);
    for (const auto& t : cascade_[j]) {
      double v = t.coefficient;
      for (const auto& [var, e] : t.powers) v *= ipow(z(var), e);
      coeffs[t.main_power] += v;
    }
    const auto& name = part.order().name(y);
    const auto roots = real_roots(coeffs);
    if (roots.empty()) {
      throw Error(ErrorCode::kNoRealRoot, "no real root for eliminated variable " +
                                              std::to_string(j + 1) + " ('" + name + "'): " +
                                              format_univariate(coeffs, name) + " = 0");
    }
    const double target = warm ? (*warm)(static_cast<Eigen::Index>(j)) : 0.0;
    std::vector<double> sorted = roots;
    std::stable_sort(sorted.begin(), sorted.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    if (sorted.size() > 1 &&
        std::abs(std::abs(sorted[0] - target) - std::abs(sorted[1] - target)) <= 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "roots " << sorted[0] << " and " << sorted[1] << " of "
          << format_univariate(coeffs, name) << " are equidistant from " << target;
      throw Error(ErrorCode::kAmbiguousRoot, msg.str());
    }
    double root = sorted[0];
    // Newton polish against the untrimmed coefficients.
    std::vector<double> deriv;
    for (std::size_t i = 1; i < coeffs.size(); ++i) deriv.push_back(static_cast<double>(i) * coeffs[i]);
    for (int it = 0; it < 3; ++it) {
      const double f = horner(coeffs, root);
      const double df = horner(deriv, root);
      if (f == 0.0 || df == 0.0) break;
      const double next = root - f / df;
      if (!std::isfinite(next) || std::abs(horner(coeffs, next)) >= std::abs(f)) break;
      root = next;
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      scale += std::abs(coeffs[i]) * ipow(std::abs(root), static_cast<std::uint32_t>(i));
    }
    const double residual = std::abs(horner(coeffs, root));
    if (residual > std::max(cfg.residual_tol, 64.0 * kEps * scale)) {
      std::ostringstream msg;
      msg << "root of " << format_univariate(coeffs, name) << " has residual " << residual;
      throw Error(ErrorCode::kNoRealRoot, msg.str());
    }
    z(static_cast<Eigen::Index>(y)) = root;
  }
  return AmbientPoint{std::move(z)};
}

AmbientPoint lift(const WhitneyPartition& part, const ReducedPoint& p,
                  const std::optional<Vector>& warm, const ProjectionConfig& cfg) {
  return Lifter(part)(p, warm, cfg);
}

Vector eliminated_values(const WhitneyPartition& part, const AmbientPoint& z) {
  Vector y(static_cast<Eigen::Index>(part.eliminated.size()));
  for (std::size_t j = 0; j < part.eliminated.size(); ++j) {
    y(static_cast<Eigen::Index>(j)) = z.coords(static_cast<Eigen::Index>(part.eliminated[j]));
  }
  return y;
}

// ---------------------------------------------------------------------------
// Pullback

PulledBackObjective::PulledBackObjective(const WhitneyPartition& part, AmbientObjective f,
                                         ProjectionConfig cfg)
    : lifter_(part), f_(std::move(f)), cfg_(cfg) {}

std::optional<double> PulledBackObjective::operator()(const ReducedPoint& p) {
  AmbientPoint z;
  try {
    z = lifter_(p, warm_, cfg_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoRealRoot || e.code() == ErrorCode::kAmbiguousRoot) {
      return std::nullopt;
    }
    throw;
  }
  const double value = f_(z);
  warm_ = eliminated_values(lifter_.partition(), z);
  last_lift_ = std::move(z);
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

PulledBackObjective pullback_objective(AmbientObjective f, const WhitneyPartition& part,
                                       const ProjectionConfig& cfg) {
  return PulledBackObjective(part, std::move(f), cfg);
}

AmbientObjective polynomial_objective(const Polynomial& f) {
  return [compiled = CompiledPolynomial(f), n = f.order().size()](const AmbientPoint& z) {
    if (static_cast<std::size_t>(z.coords.size()) != n) {
      throw Error(ErrorCode::kInvalidArgument, "objective point has the wrong dimension");
    }
    return compiled(std::span<const double>(z.coords.data(), n));
  };
}

double max_source_residual(const WhitneyPartition& part, const AmbientPoint& z) {
  double worst = 0.0;
  const std::span<const double> point(z.coords.data(), static_cast<std::size_t>(z.coords.size()));
  for (const auto& p : part.system.polynomials) {
    const double v = std::abs(evaluate(p, point));
    if (!(v <= worst)) worst = v;
  }
  return worst;
}

}  // namespace whitneyopt
