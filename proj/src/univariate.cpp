#include "whitneyopt/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace whitneyopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// sum |a_i| |x|^i, the rounding scale of a Horner evaluation at x.
double magnitude(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * ax + std::abs(*it);
  return acc;
}

std::vector<double> derivative(std::span<const double> coeffs) {
  std::vector<double> out;
  for (std::size_t i = 1; i < coeffs.size(); ++i) out.push_back(static_cast<double>(i) * coeffs[i]);
  return out;
}

// Root in [lo, hi] given f(lo) and f(hi) of opposite sign.
double refine(std::span<const double> coeffs, std::span<const double> deriv, double lo, double hi,
              double flo) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = horner(coeffs, x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    const double dfx = horner(deriv, x);
    double next = dfx != 0.0 ? x - fx / dfx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

// Roots of a polynomial with nonzero leading coefficient, inside (lo, hi).
std::vector<double> roots_between(std::span<const double> coeffs, double lo, double hi) {
  const std::size_t degree = coeffs.size() - 1;
  if (degree == 0) return {};
  if (degree == 1) {
    const double r = -coeffs[0] / coeffs[1];
    if (r > lo && r < hi) return {r};
    return {};
  }
  const auto deriv = derivative(coeffs);
  const auto critical = roots_between(deriv, lo, hi);

  std::vector<double> knots;
  knots.reserve(critical.size() + 2);
  knots.push_back(lo);
  knots.insert(knots.end(), critical.begin(), critical.end());
  knots.push_back(hi);

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double fa = horner(coeffs, a);
    const double fb = horner(coeffs, b);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      roots.push_back(refine(coeffs, deriv, a, b, fa));
    }
  }
  // Even-multiplicity roots touch zero at a critical point without a sign change.
  for (double c : critical) {
    if (std::abs(horner(coeffs, c)) <= 1e3 * kEps * magnitude(coeffs, c)) roots.push_back(c);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || std::abs(r - unique.back()) > 1e-12 * (1.0 + std::abs(r))) {
      unique.push_back(r);
    }
  }
  return unique;
}

}  // namespace

double horner(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double cauchy_bound(std::span<const double> coeffs) {
  const double lead = coeffs.back();
  double ratio = 0.0;
  for (std::size_t i = 0; i + 1 < coeffs.size(); ++i) {
    ratio = std::max(ratio, std::abs(coeffs[i] / lead));
  }
  return 1.0 + ratio;
}

std::vector<double> real_roots(std::span<const double> coeffs) {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  std::size_t n = coeffs.size();
  while (n > 0 && std::abs(coeffs[n - 1]) <= 1e-14 * scale) --n;
  if (n <= 1) return {};
  const auto trimmed = coeffs.first(n);
  const double bound = cauchy_bound(trimmed);
  return roots_between(trimmed, -bound, bound);
}

std::string format_univariate(std::span<const double> coeffs, const std::string& var) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (coeffs[i] == 0.0) continue;
    if (!first) out << " + ";
    first = false;
    out << coeffs[i];
    if (i >= 1) out << "*" << var;
    if (i >= 2) out << "^" << i;
  }
  if (first) out << "0";
  return out.str();
}

}  // namespace whitneyopt
