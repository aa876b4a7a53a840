#pragma once

#include <span>
#include <string>
#include <vector>

namespace whitneyopt {

/// Value of sum_i coeffs[i] * x^i (Horner).
double horner(std::span<const double> coeffs, double x);

/// Cauchy bound 1 + max_i |a_i / a_n|; every root lies strictly inside it.
double cauchy_bound(std::span<const double> coeffs);

/// All real roots, ascending, of the polynomial with coefficients `coeffs`
/// (constant term first). Leading coefficients negligible relative to the
/// largest one are dropped. Roots are isolated on the monotone intervals
/// between critical points, then refined by safeguarded Newton.
/// Returns nothing for a constant polynomial.
std::vector<double> real_roots(std::span<const double> coeffs);

/// Human-readable form, e.g. "1*t^5 + 0.5".
std::string format_univariate(std::span<const double> coeffs, const std::string& var);

}  // namespace whitneyopt
