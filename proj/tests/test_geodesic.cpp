#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "whitneyopt/error.hpp"
#include "whitneyopt/geodesic.hpp"

using namespace whitneyopt;
using whitneyopt::testing::order_of;
using whitneyopt::testing::parse_all;

namespace {

ConstraintSet constraints(std::vector<std::string> names, std::vector<std::string> polys) {
  const auto order = order_of(std::move(names));
  return ConstraintSet(order, parse_all(polys, order));
}

ConstraintSet quartic_curve() { return ConstraintSet::reduced(whitneyopt::testing::quartic_partition()); }

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

double max_asymmetry(const ChristoffelTensor& gamma) {
  double worst = 0.0;
  const auto d = gamma.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) worst = std::max(worst, std::abs(gamma(i, j, k) - gamma(i, k, j)));
  return worst;
}

// Unit tangent at a point of a one-dimensional curve.
Vector unit_tangent(const ConstraintSet& g, const Vector& p) {
  return tangent_frame(g, ReducedPoint{p}).tangent_basis.col(0);
}

}  // namespace

TEST_CASE("christoffel: circle at (x, u) = (1, 0)") {
  // Coordinates in order (x, u).
  const auto g = constraints({"x", "u"}, {"x^2 + u^2 - 1"});
  const auto gamma = christoffel(g, ReducedPoint{vec({1.0, 0.0})});
  CHECK(gamma(0, 0, 0) == doctest::Approx(1.0));
  CHECK(gamma(0, 1, 1) == doctest::Approx(1.0));
  CHECK(gamma(0, 0, 1) == doctest::Approx(0.0));
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) CHECK(gamma(1, j, k) == doctest::Approx(0.0));
  const Vector c = gamma.contract(vec({0.0, 1.0}));
  CHECK(c(0) == doctest::Approx(1.0));
  CHECK(c(1) == doctest::Approx(0.0));
}

TEST_CASE("christoffel: affine manifold is flat") {
  const auto g = constraints({"a", "b", "c"}, {"a + 2*b - c + 1"});
  const auto gamma = christoffel(g, ReducedPoint{vec({0.0, 0.0, 1.0})});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) CHECK(gamma(i, j, k) == 0.0);
}

TEST_CASE("christoffel: singular point") {
  const auto g = constraints({"u", "x"}, {"x*u"});
  try {
    christoffel(g, ReducedPoint{vec({0.0, 0.0})});
    FAIL("expected NOT_REGULAR");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotRegular);
  }
}

TEST_CASE("property: christoffel symmetry in the lower indices") {
  const auto g = quartic_curve();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-0.99, 0.99);
  for (int i = 0; i < 200; ++i) {
    const auto p = whitneyopt::testing::quartic_point(uni(rng), i % 2 == 0);
    CHECK(max_asymmetry(christoffel(g, ReducedPoint{p})) <= 1e-14);
  }
  const auto two = constraints({"a", "b", "c", "d"}, {"a^2 + b^2 + c^2 + d^2 - 1", "d - a*b*c"});
  CHECK(max_asymmetry(christoffel(two, ReducedPoint{vec({0.1, 0.2, 0.97, 0.1 * 0.2 * 0.97})})) <= 1e-14);
}

TEST_CASE("geodesic_integrate: circle quarter turn") {
  const auto g = constraints({"x", "u"}, {"x^2 + u^2 - 1"});
  const GeodesicState start{vec({1.0, 0.0}), vec({0.0, 1.0}), 0.0};
  const auto end = geodesic_integrate(g, start, std::numbers::pi / 2.0, 1e-3);
  CHECK(std::abs(end.position(0) - 0.0) <= 1e-6);
  CHECK(std::abs(end.position(1) - 1.0) <= 1e-6);
  CHECK(end.time == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("geodesic_integrate: zero duration") {
  const auto g = constraints({"x", "u"}, {"x^2 + u^2 - 1"});
  const GeodesicState start{vec({1.0, 0.0}), vec({0.0, 1.0}), 0.25};
  const auto end = geodesic_integrate(g, start, 0.0, 1e-3);
  CHECK(end.position == start.position);
  CHECK(end.velocity == start.velocity);
  CHECK(end.time == start.time);
}

TEST_CASE("geodesic_integrate: rejects a non-positive step") {
  const auto g = constraints({"x", "u"}, {"x^2 + u^2 - 1"});
  const GeodesicState start{vec({1.0, 0.0}), vec({0.0, 1.0}), 0.0};
  CHECK_THROWS_AS(geodesic_integrate(g, start, 1.0, 0.0), Error);
}

TEST_CASE("property: geodesics on the quartic curve") {
  const auto g = quartic_curve();
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> uni(-0.6, 0.6);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector p = whitneyopt::testing::quartic_point(uni(rng), trial % 2 == 0);
    const Vector v = unit_tangent(g, p) * (trial % 3 == 0 ? -0.5 : 0.5);
    const GeodesicState start{p, v, 0.0};

    SUBCASE("speed and constraint conservation over unit duration") {
      const auto end = geodesic_integrate(g, start, 1.0, 1e-3);
      CHECK(std::abs(end.velocity.norm() - v.norm()) <= 1e-6 * v.norm());
      CHECK(g.max_residual(end.position) <= 1e-8);
    }
    SUBCASE("residual along the path") {
      GeodesicState s = start;
      for (int k = 0; k < 10; ++k) {
        s = geodesic_integrate(g, s, 0.05, 1e-3);
        CHECK(g.max_residual(s.position) <= 1e-6);
      }
    }
    SUBCASE("reversibility") {
      const auto forward = geodesic_integrate(g, start, 0.5, 1e-3);
      const auto back = geodesic_integrate(g, forward, -0.5, 1e-3);
      CHECK((back.position - p).norm() <= 1e-6);
      CHECK(back.time == doctest::Approx(0.0));
    }
  }
}
