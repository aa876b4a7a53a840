#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "whitneyopt/error.hpp"

using namespace whitneyopt;
using whitneyopt::testing::order_of;
using whitneyopt::testing::parse_all;

namespace {

DescentProblem quartic_problem(const std::string& objective = "y") {
  auto part = whitneyopt::testing::quartic_partition();
  auto f = polynomial_objective(parse_polynomial(objective, part.order()));
  return DescentProblem{std::move(part), std::move(f), ReducedPoint{Vector{{0.0, 1.0}}}};
}

DescentProblem hyperbola_problem() {
  auto part = whitneyopt::testing::hyperbola_partition();
  auto f = polynomial_objective(parse_polynomial("(x - 2)*(x - 2) + (u - 2)*(u - 2)", part.order()));
  return DescentProblem{std::move(part), std::move(f), ReducedPoint{Vector{{3.0, 1.0 / 3.0}}}};
}

DescentConfig quartic_config(std::uint64_t seed) {
  DescentConfig cfg;
  cfg.seed = seed;
  cfg.alpha0 = 0.25;
  cfg.c_forcing = 1.0;
  cfg.max_iterations = 5000;
  return cfg;
}

DescentTrace trace_with(PollEvent event, std::size_t n, double final_alpha) {
  DescentTrace t;
  for (std::size_t j = 0; j < n; ++j) t.iterations.push_back({j, 1.0, 0.0, event, {}, {}, {}});
  t.final_alpha = final_alpha;
  return t;
}

}  // namespace

TEST_CASE("random_unit_direction") {
  SUBCASE("m = 1 gives a sign") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
      const double v = random_unit_direction(rng, 1)(0);
      CHECK((v == 1.0 || v == -1.0));
    }
  }
  SUBCASE("m = 3: unit norm and centred coordinates") {
    std::mt19937_64 rng(3);
    const int draws = 100000;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < draws; ++i) {
      const Vector u = random_unit_direction(rng, 3);
      REQUIRE(std::abs(u.norm() - 1.0) <= 1e-12);
      mean += u;
    }
    mean /= draws;
    // Each coordinate of a uniform point on S^2 has variance 1/3.
    const double sigma = std::sqrt(1.0 / 3.0 / draws);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(mean(i)) <= 3.0 * sigma);
  }
  SUBCASE("seeded sequences repeat") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 50; ++i) CHECK(random_unit_direction(a, 4) == random_unit_direction(b, 4));
  }
}

TEST_CASE("descend: quartic curve, f = y, seed 7, C = 1") {
  auto problem = quartic_problem();
  // Projected from (0.3, 1); the file's start (0, 1) is a critical point of y.
  const auto g = ConstraintSet::reduced(problem.partition);
  const auto frame = tangent_frame(g, problem.start);
  problem.start = *project_to_manifold(g, frame, Vector::Constant(1, 0.3 * frame.tangent_basis(0, 0)), {}).point;

  const auto trace = descend(problem, quartic_config(7));
  const double oracle = whitneyopt::testing::quartic_min_y();
  CHECK(std::abs(trace.final_objective - oracle) <= 1e-3);
  CHECK(trace.iterations.size() <= 5000);
  CHECK(check_convergence(trace, 500));
  CHECK(trace.converged);
  CHECK(trace.final_alpha > 0.0);
  CHECK(max_source_residual(problem.partition, trace.final_ambient) <= 1e-9);
}

TEST_CASE("descend: C = 1 cannot leave the critical point (0, 1)") {
  // Along the curve y(u) = -1 - u^2/5 + O(u^4), so each poll gains at most
  // about alpha^2 / 5, short of the alpha^2 the forcing term demands.
  const auto trace = descend(quartic_problem(), quartic_config(7));
  for (const auto& r : trace.iterations) CHECK(r.event != PollEvent::kSuccess);
  CHECK(trace.final_objective == -1.0);
}

TEST_CASE("descend: default forcing constant from the critical point") {
  auto cfg = quartic_config(7);
  cfg.c_forcing.reset();
  const auto trace = descend(quartic_problem(), cfg);
  CHECK(trace.forcing_constant == doctest::Approx(2e-4));
  CHECK(std::abs(trace.final_objective - whitneyopt::testing::quartic_min_y()) <= 1e-3);
  CHECK(trace.converged);
}

TEST_CASE("descend: stops once alpha leaves the normal range") {
  auto cfg = quartic_config(1);
  cfg.max_iterations = 100000;
  const auto trace = descend(quartic_problem("3"), cfg);
  CHECK(trace.iterations.size() < 2000);
  CHECK(trace.final_alpha > 0.0);
  CHECK(trace.final_alpha < std::numeric_limits<double>::min());
}

TEST_CASE("descend: constant objective never moves") {
  const auto problem = quartic_problem("3");
  auto cfg = quartic_config(11);
  cfg.c_forcing.reset();
  cfg.max_iterations = 200;
  const auto trace = descend(problem, cfg);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.iterations) {
    CHECK(r.event != PollEvent::kSuccess);
    CHECK(r.alpha < previous);
    previous = r.alpha;
    CHECK(r.point == problem.start.coords);
  }
  CHECK(trace.final_point.coords == problem.start.coords);
  CHECK(trace.final_objective == 3.0);
  CHECK(trace.forcing_constant == doctest::Approx(4e-4));
}

TEST_CASE("descend: four-variable branch") {
  const auto problem = hyperbola_problem();
  DescentConfig cfg;
  cfg.seed = 3;
  const auto trace = descend(problem, cfg);
  CHECK(std::abs(trace.final_objective - whitneyopt::testing::hyperbola_min()) <= 1e-3);
  CHECK(trace.final_point.coords(0) > 0.0);
  for (double r : whitneyopt::testing::hyperbola_source_residuals(trace.final_ambient.coords)) {
    CHECK(std::abs(r) <= 1e-9);
  }
}

TEST_CASE("descend: invalid start") {
  auto problem = quartic_problem();
  problem.start = ReducedPoint{Vector{{0.5, 0.5}}};
  try {
    descend(problem, quartic_config(0));
    FAIL("expected INVALID_START");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidStart);
  }
  problem.start = ReducedPoint{Vector{{0.0}}};
  CHECK_THROWS_AS(descend(problem, quartic_config(0)), Error);
}

TEST_CASE("descend: zero iterations") {
  auto cfg = quartic_config(7);
  cfg.max_iterations = 0;
  const auto problem = quartic_problem();
  const auto trace = descend(problem, cfg);
  CHECK(trace.iterations.empty());
  CHECK(trace.final_point.coords == problem.start.coords);
  CHECK(trace.final_objective == doctest::Approx(-1.0));
  CHECK_FALSE(trace.converged);
}

TEST_CASE("descend: config validation") {
  auto cfg = quartic_config(0);
  cfg.alpha_max = 0.1;
  CHECK_THROWS_AS(descend(quartic_problem(), cfg), Error);
  cfg = quartic_config(0);
  cfg.c_forcing = -1.0;
  CHECK_THROWS_AS(descend(quartic_problem(), cfg), Error);
}

TEST_CASE("check_convergence: examples") {
  CHECK_FALSE(check_convergence(trace_with(PollEvent::kRebase, 1000, 1e-12), 500));
  CHECK(check_convergence(trace_with(PollEvent::kUnsuccessful, 1000, 1e-9), 500));
  CHECK_FALSE(check_convergence(trace_with(PollEvent::kUnsuccessful, 1000, 1e-3), 500));

  auto late = trace_with(PollEvent::kUnsuccessful, 1000, 1e-9);
  late.iterations[700].event = PollEvent::kRebase;
  CHECK_FALSE(check_convergence(late, 500));
  auto early = trace_with(PollEvent::kUnsuccessful, 1000, 1e-9);
  early.iterations[100].event = PollEvent::kRebase;
  CHECK(check_convergence(early, 500));
}

TEST_CASE("property: descent trace invariants") {
  const auto problem = quartic_problem();
  const auto g = ConstraintSet::reduced(problem.partition);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = quartic_config(seed);
    cfg.c_forcing.reset();
    cfg.max_iterations = 1500;
    // Large alpha_max keeps the oracle busy, which exercises re-basing.
    cfg.alpha0 = 1.0;
    const auto trace = descend(problem, cfg);
    const double c = trace.forcing_constant;

    double f_prev = -1.0;  // f = y at the start point (0, 1)
    Vector base_prev = problem.start.coords;
    Vector point_prev = problem.start.coords;
    bool rebased_before = false;
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
      const auto& r = trace.iterations[i];
      CHECK(r.j == i);

      // Monotonicity with sufficient decrease.
      if (r.event == PollEvent::kSuccess) {
        CHECK(r.f < f_prev - c * r.alpha * r.alpha);
      } else {
        CHECK(r.f == f_prev);
        CHECK(r.point == point_prev);
      }

      // Step-size law.
      if (i + 1 < trace.iterations.size()) {
        const double next = trace.iterations[i + 1].alpha;
        const double expected = r.event == PollEvent::kSuccess ? std::min(cfg.alpha_max, cfg.gamma * r.alpha)
                                                               : cfg.theta * r.alpha;
        CHECK(next == expected);
      }

      // Feasibility.
      CHECK(g.max_residual(r.point) <= cfg.projection.residual_tol);

      // Re-base reset.
      if (r.event == PollEvent::kRebase) {
        rebased_before = true;
        CHECK(r.w.isZero(0.0));
        CHECK(r.base == r.point);
      } else {
        CHECK(r.base == base_prev);
      }
      f_prev = r.f;
      base_prev = r.base;
      point_prev = r.point;
    }
    CHECK(rebased_before);
  }
}

TEST_CASE("property: determinism") {
  const auto problem = quartic_problem();
  auto cfg = quartic_config(99);
  cfg.c_forcing.reset();
  cfg.max_iterations = 800;
  const auto a = descend(problem, cfg);
  const auto b = descend(problem, cfg);
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    CHECK(a.iterations[i].alpha == b.iterations[i].alpha);
    CHECK(a.iterations[i].f == b.iterations[i].f);
    CHECK(a.iterations[i].event == b.iterations[i].event);
    CHECK(a.iterations[i].point == b.iterations[i].point);
  }
  cfg.seed = 100;
  const auto c = descend(problem, cfg);
  bool differs = false;
  for (std::size_t i = 0; i < c.iterations.size() && !differs; ++i) {
    differs = c.iterations[i].point != a.iterations[i].point;
  }
  CHECK(differs);
}

TEST_CASE("descend: observer sees every record") {
  auto cfg = quartic_config(4);
  cfg.max_iterations = 37;
  std::size_t seen = 0;
  const auto trace = descend(quartic_problem(), cfg, [&](const IterationRecord& r) {
    CHECK(r.j == seen);
    ++seen;
  });
  CHECK(seen == 37);
  CHECK(trace.iterations.size() == 37);
}
