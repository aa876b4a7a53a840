// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include "test_support.hpp"
#include "whitneyopt/error.hpp"
#include "whitneyopt/geodesic.hpp"
#include "whitneyopt/problem.hpp"

using namespace whitneyopt;
namespace fs = std::filesystem;
using whitneyopt::testing::order_of;
using whitneyopt::testing::parse_all;

namespace {

const fs::path kProblems = WHITNEYOPT_PROBLEM_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double inf_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.rowwise().lpNorm<1>().maxCoeff(); }

ConstraintSet quartic_curve() { return ConstraintSet::reduced(whitneyopt::testing::quartic_partition()); }

Outcome quartic_end_to_end() {
  const double oracle = whitneyopt::testing::quartic_min_y();
  const auto problem = load_problem(kProblems / "curve_quartic.txt");
  Stopwatch clock;
  double worst = 0.0;
  std::size_t max_iters = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DescentConfig cfg;
    cfg.seed = seed;
    cfg.max_iterations = 5000;
    const auto report = run_problem(problem, cfg);
    worst = std::max(worst, std::abs(report.objective - oracle));
    max_iters = std::max(max_iters, report.iterations);
  }
  const double elapsed = clock.seconds();
  return {worst <= 1e-3 && max_iters <= 5000 && elapsed < 10.0,
          fmt::format("oracle {:.9f}, worst gap {:.2e} over 10 seeds, {:.2f} s", oracle, worst, elapsed)};
}

Outcome hyperbola_end_to_end() {
  const double oracle = whitneyopt::testing::hyperbola_min();
  const auto problem = load_problem(kProblems / "hyperbola.txt");
  DescentConfig cfg;
  cfg.seed = 0;
  const auto& part = problem.partition;
  const Lifter lifter(part);
  double worst_residual = 0.0;
  bool branch = true;
  auto observe = [&](const IterationRecord& r) {
    const auto z = lifter(ReducedPoint{r.point}, std::nullopt, cfg.projection);
    for (double g : whitneyopt::testing::hyperbola_source_residuals(z.coords)) {
      worst_residual = std::max(worst_residual, std::abs(g));
    }
    branch = branch && r.point(0) > 0.0;
  };
  const DescentProblem dp{part, polynomial_objective(problem.objective), problem.start};
  const auto trace = descend(dp, cfg, observe);
  const double gap = std::abs(trace.final_objective - oracle);
  return {gap <= 1e-3 && worst_residual <= 1e-9 && branch,
          fmt::format("gap {:.2e}, worst source residual {:.2e} over {} visited points", gap,
                      worst_residual, trace.iterations.size())};
}

Outcome projection_suite() {
  const auto g = quartic_curve();
  const ProjectionConfig cfg;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Stopwatch clock;
  int ok = 0, failed_far = 0;
  double worst = 0.0, farthest = 0.0;
  for (int b = 0; b < 20; ++b) {
    const double u = -0.9 + 1.8 * b / 19.0;
    const ReducedPoint base{whitneyopt::testing::quartic_point(u, b % 2 == 0)};
    const auto frame = tangent_frame(g, base);
    for (int i = 0; i < 100; ++i) {
      const Vector w = Vector::Constant(1, 0.1 * uni(rng));
      const auto r = project_to_manifold(g, frame, w, cfg);
      if (!r.ok()) continue;
      const double res = g.max_residual(r.point->coords);
      const double dist = (r.point->coords - (base.coords + frame.tangent_basis * w)).norm();
      worst = std::max(worst, res);
      farthest = std::max(farthest, dist);
      if (res <= 1e-10 && dist <= 0.5) ++ok;
    }
    for (int i = 0; i < 5; ++i) {
      const double len = 10.0 * (1.0 + i);
      const auto r = project_to_manifold(g, frame, Vector::Constant(1, i % 2 ? -len : len), cfg);
      if (!r.ok()) ++failed_far;
    }
  }
  const double elapsed = clock.seconds();
  return {ok == 2000 && failed_far == 100 && elapsed < 1.0,
          fmt::format("{}/2000 small steps ok (max residual {:.1e}, max drift {:.3f}), {}/100 long "
                      "steps rejected, {:.3f} s",
                      ok, worst, farthest, failed_far, elapsed)};
}

Outcome lift_suite() {
  const auto part = whitneyopt::testing::quartic_partition();
  const Lifter lifter(part);
  const ProjectionConfig cfg;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Stopwatch clock;
  double worst_gap = 0.0, worst_res = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ReducedPoint p{whitneyopt::testing::quartic_point(uni(rng), i % 2 == 0)};
    const auto z = lifter(p, std::nullopt, cfg);
    worst_gap = std::max(worst_gap, std::abs(z.coords(2) - whitneyopt::testing::quartic_y(p.coords(0), p.coords(1))));
    worst_res = std::max(worst_res, max_source_residual(part, z));
  }
  const double elapsed = clock.seconds();
  return {worst_gap <= 1e-9 && worst_res <= 1e-9 && elapsed < 1.0,
          fmt::format("max |y - closed form| {:.1e}, max residual {:.1e}, {:.3f} s", worst_gap,
                      worst_res, elapsed)};
}

Outcome frame_suite() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-0.99, 0.99);
  double worst_orth = 0.0, worst_null = 0.0;
  int frames = 0;
  auto inspect = [&](const ConstraintSet& g, const TangentFrame& f) {
    const Matrix j = g.jacobian(f.base.coords);
    const auto m = f.tangent_basis.cols();
    worst_orth = std::max(worst_orth, inf_norm(f.tangent_basis.transpose() * f.tangent_basis -
                                               Matrix::Identity(m, m)));
    worst_null = std::max(worst_null, inf_norm(j * f.tangent_basis) / (1.0 + inf_norm(j)));
    ++frames;
  };
  const auto g = quartic_curve();
  for (int i = 0; i < 500; ++i) {
    inspect(g, tangent_frame(g, ReducedPoint{whitneyopt::testing::quartic_point(uni(rng), i % 2 == 0)}));
  }
  // Frames built during a descent run, including every re-base.
  const auto problem = load_problem(kProblems / "curve_quartic.txt");
  DescentConfig cfg;
  cfg.alpha0 = 1.0;
  cfg.max_iterations = 2000;
  descend({problem.partition, polynomial_objective(problem.objective), problem.start}, cfg,
          [&](const IterationRecord& r) {
            if (r.event == PollEvent::kRebase) inspect(g, tangent_frame(g, ReducedPoint{r.base}));
          });

  const auto order = order_of({"u", "x"});
  const ConstraintSet cross(order, parse_all({"x*u"}, order));
  bool singular = false;
  try {
    tangent_frame(cross, ReducedPoint{Vector::Zero(2)});
  } catch (const Error& e) {
    singular = e.code() == ErrorCode::kNotRegular;
  }
  return {worst_orth <= 1e-12 && worst_null <= 1e-10 && singular,
          fmt::format("{} frames, max |U'U - I| {:.1e}, max |JU|/(1+|J|) {:.1e}, cross point {}",
                      frames, worst_orth, worst_null, singular ? "NOT_REGULAR" : "accepted")};
}

Outcome geodesic_suite() {
  const auto order = order_of({"x", "u"});
  const ConstraintSet circle(order, parse_all({"x^2 + u^2 - 1"}, order));
  const auto quarter = geodesic_integrate(circle, {Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}, 0.0},
                                          std::numbers::pi / 2.0, 1e-3);
  const double turn_err = (quarter.position - Vector{{0.0, 1.0}}).lpNorm<Eigen::Infinity>();

  const auto g = quartic_curve();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(-0.6, 0.6);
  double drift = 0.0, asym = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vector p = whitneyopt::testing::quartic_point(uni(rng), t % 2 == 0);
    const Vector v = 0.5 * tangent_frame(g, ReducedPoint{p}).tangent_basis.col(0);
    const auto end = geodesic_integrate(g, {p, v, 0.0}, 1.0, 1e-3);
    drift = std::max(drift, std::abs(end.velocity.norm() - v.norm()) / v.norm());
  }
  for (int i = 0; i < 200; ++i) {
    const auto gamma = christoffel(g, ReducedPoint{whitneyopt::testing::quartic_point(uni(rng), i % 2 == 0)});
    for (std::size_t a = 0; a < gamma.dim(); ++a)
      for (std::size_t b = 0; b < gamma.dim(); ++b)
        for (std::size_t c = 0; c < gamma.dim(); ++c) asym = std::max(asym, std::abs(gamma(a, b, c) - gamma(a, c, b)));
  }
  return {turn_err <= 1e-6 && drift <= 1e-6 && asym <= 1e-14,
          fmt::format("quarter-turn error {:.1e}, relative speed drift {:.1e}, Christoffel asymmetry {:.1e}",
                      turn_err, drift, asym)};
}

Outcome calculus_suite() {
  const auto order = order_of({"a", "b", "c", "d", "e"});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  double worst_fd = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto p = whitneyopt::testing::random_polynomial(rng, order, 5, 6, false);
    std::vector<double> z(5);
    for (auto& v : z) v = point(rng);
    for (std::size_t var = 0; var < 5; ++var) {
      const double h = 1e-5;
      auto zp = z, zm = z;
      zp[var] += h;
      zm[var] -= h;
      const double fd = (evaluate(p, zp) - evaluate(p, zm)) / (2.0 * h);
      const double exact = evaluate(partial_derivative(p, var), z);
      worst_fd = std::max(worst_fd, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  int exact_ok = 0, tried = 0;
  while (tried < 1000) {
    const auto p = whitneyopt::testing::random_polynomial(rng, order, 5);
    if (p.is_constant()) continue;
    ++tried;
    const auto dec = decompose(p);
    const Polynomial rank(order, Polynomial::TermMap{{dec.rank, Rational(1)}});
    if (dec.initial * rank + dec.tail == p) ++exact_ok;
  }
  return {worst_fd <= 1e-6 && exact_ok == 1000,
          fmt::format("max relative FD gap {:.1e} on 200 polynomials, {}/1000 exact reconstructions",
                      worst_fd, exact_ok)};
}

Outcome linear_suite() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  double worst_res = 0.0, worst_direct = 0.0;
  int solved = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd a(4, 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
    Eigen::VectorXd b(4);
    for (auto& v : b) v = normal(rng);
    const auto form = linear_whitney(a, b, 1);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, normal(rng));
    const Eigen::VectorXd x = form.solve_x(u);
    const Eigen::VectorXd y = form.solve_y(x, u);
    Eigen::VectorXd z(5);
    z << y, x, u;
    const Eigen::VectorXd direct = a.leftCols(4).fullPivLu().solve(b - a.rightCols(1) * u);
    worst_res = std::max(worst_res, (a * z - b).norm());
    worst_direct = std::max(worst_direct, (direct - z.head(4)).norm() / (1.0 + direct.norm()));
    ++solved;
  }
  return {solved == 100 && worst_res <= 1e-9 && worst_direct <= 1e-9,
          fmt::format("{} systems, max |Az - b| {:.1e}, max gap to direct solve {:.1e}", solved,
                      worst_res, worst_direct)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / ("whitneyopt_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto problem = (kProblems / "curve_quartic.txt").string();
  std::string traces[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const auto trace = dir / fmt::format("trace{}.csv", k);
    const auto report = dir / fmt::format("report{}.json", k);
    const std::string cmd = fmt::format(
        "\"{}\" run --problem \"{}\" --seed 11 --trace \"{}\" --report \"{}\"", WHITNEYOPT_CLI,
        problem, trace.string(), report.string());
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    traces[k] = slurp(trace);
  }
  fs::remove_all(dir);
  const bool same = !traces[0].empty() && traces[0] == traces[1];
  return {same && codes[0] == codes[1] && codes[0] != 1,
          fmt::format("exit codes {}/{}, trace {} bytes, {}", codes[0], codes[1], traces[0].size(),
                      same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"quartic curve end-to-end, 10 seeds", quartic_end_to_end},
      {"four-variable branch end-to-end", hyperbola_end_to_end},
      {"projection suite", projection_suite},
      {"lift suite", lift_suite},
      {"frame suite", frame_suite},
      {"geodesic suite", geodesic_suite},
      {"calculus suite", calculus_suite},
      {"linear block-triangular solve", linear_suite},
      {"end-to-end determinism", determinism},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << fmt::format("[{}] {}. {}: {}", outcome.pass ? "PASS" : "FAIL", index++, name,
                             outcome.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", std::size(criteria) - failures,
                           std::size(criteria))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
