#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "whitneyopt/geometry.hpp"

namespace whitneyopt {

struct DescentConfig {
  double alpha0 = 0.25;
  double alpha_max = std::numeric_limits<double>::infinity();
  double theta = 0.5;
  double gamma = 2.0;
  /// C in the forcing function C * alpha^2. Unset: 1e-4 * (1 + |f(p0)|).
  std::optional<double> c_forcing;
  /// Iteration budget. A run also stops once alpha falls below the smallest
  /// normal double.
  std::size_t max_iterations = 5000;
  std::uint64_t seed = 0;
  ProjectionConfig projection;
  /// Convergence test applied to the finished trace.
  std::size_t convergence_window = 500;
  double convergence_alpha = 1e-6;

  void validate() const;
};

enum class PollEvent { kSuccess, kUnsuccessful, kRebase };

std::string_view to_string(PollEvent event);

struct IterationRecord {
  std::size_t j;
  double alpha;  // step size used at this iteration
  double f;      // objective at the current point after the iteration
  PollEvent event;
  Vector point;  // current point after the iteration
  Vector base;   // base point for the next iteration
  Vector w;      // tangent coordinates for the next iteration
};

struct DescentTrace {
  std::vector<IterationRecord> iterations;
  ReducedPoint final_point;
  AmbientPoint final_ambient;
  double final_objective = 0.0;
  double final_alpha = 0.0;
  double forcing_constant = 0.0;
  bool converged = false;
};

struct DescentProblem {
  WhitneyPartition partition;
  AmbientObjective objective;
  ReducedPoint start;
};

/// Uniform on the unit sphere in R^m: normalized standard normal draws.
Vector random_unit_direction(std::mt19937_64& rng, std::size_t m);

/// Probabilistic descent over the reduced manifold, re-basing the tangent
/// frame whenever the projection oracle rejects a step. `observer`, when set,
/// sees each record as it is produced.
/// Throws Error(kInvalidStart) if the start is off the manifold or cannot be lifted.
DescentTrace descend(const DescentProblem& problem, const DescentConfig& cfg,
                     const std::function<void(const IterationRecord&)>& observer = {});

/// True iff the last `window` records contain no re-base and the final step
/// size is below `alpha_threshold`.
bool check_convergence(const DescentTrace& trace, std::size_t window,
                       double alpha_threshold = 1e-6);

}  // namespace whitneyopt
