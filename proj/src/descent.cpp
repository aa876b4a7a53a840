#include "whitneyopt/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "whitneyopt/error.hpp"

namespace whitneyopt {

void DescentConfig::validate() const {
  if (!(alpha0 > 0.0) || !(alpha_max >= alpha0)) {
    throw Error(ErrorCode::kInvalidArgument, "require 0 < alpha0 <= alpha_max");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must lie in (0, 1)");
  }
  if (!(gamma > 1.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must exceed 1");
  if (c_forcing && !(*c_forcing > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "forcing constant must be positive");
  }
  projection.validate();
}

std::string_view to_string(PollEvent event) {
  switch (event) {
    case PollEvent::kSuccess: return "SUCCESS";
    case PollEvent::kUnsuccessful: return "UNSUCCESSFUL";
    case PollEvent::kRebase: return "REBASE";
  }
  return "UNKNOWN";
}

Vector random_unit_direction(std::mt19937_64& rng, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "direction dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(static_cast<Eigen::Index>(m));
  for (;;) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    const double norm = u.norm();
    if (norm > 0.0) return u / norm;
  }
}

DescentTrace descend(const DescentProblem& problem, const DescentConfig& cfg,
                     const std::function<void(const IterationRecord&)>& observer) {
  cfg.validate();
  const auto& part = problem.partition;
  const ConstraintSet g = ConstraintSet::reduced(part);
  const ReducedPoint& start = problem.start;

  if (static_cast<std::size_t>(start.coords.size()) != g.dimension() || !start.coords.allFinite()) {
    throw Error(ErrorCode::kInvalidStart, "start point has the wrong dimension or is not finite");
  }
  const double start_residual = g.max_residual(start.coords);
  if (!(start_residual <= cfg.projection.residual_tol)) {
    throw Error(ErrorCode::kInvalidStart,
                "start point is off the manifold (residual " + std::to_string(start_residual) + ")");
  }

  PulledBackObjective objective(part, problem.objective, cfg.projection);
  const auto f0 = objective(start);
  if (!f0) throw Error(ErrorCode::kInvalidStart, "objective cannot be evaluated at the start point");

  DescentTrace trace;
  trace.forcing_constant = cfg.c_forcing.value_or(1e-4 * (1.0 + std::abs(*f0)));
  const double c = trace.forcing_constant;
  const std::size_t m = g.manifold_dim();

  ReducedPoint current = start;
  AmbientPoint current_ambient = *objective.last_lift();
  double f_current = *f0;
  Vector w = Vector::Zero(static_cast<Eigen::Index>(m));
  double alpha = cfg.alpha0;
  TangentFrame frame = tangent_frame(g, current);
  std::mt19937_64 rng(cfg.seed);

  const std::size_t iterations = m == 0 ? 0 : cfg.max_iterations;
  trace.iterations.reserve(iterations);
  for (std::size_t j = 0; j < iterations; ++j) {
    // Tangents
    const Vector u = random_unit_direction(rng, m);
    const Vector w_plus = w + alpha * u;
    const Vector w_minus = w - alpha * u;
    const ProjectionResult plus = project_to_manifold(g, frame, w_plus, cfg.projection);
    const ProjectionResult minus = project_to_manifold(g, frame, w_minus, cfg.projection);

    const double alpha_used = alpha;
    PollEvent event;
    if (!plus.ok() || !minus.ok()) {
      // Move: the oracle rejected the chart; re-base at the current point.
      event = PollEvent::kRebase;
      frame = tangent_frame(g, current);
      w.setZero();
      alpha *= cfg.theta;
    } else {
      // Polling
      const double threshold = f_current - c * alpha * alpha;
      event = PollEvent::kUnsuccessful;
      if (const auto f = objective(*plus.point); f && *f < threshold) {
        event = PollEvent::kSuccess;
        current = *plus.point;
        f_current = *f;
        w = w_plus;
      } else if (const auto f = objective(*minus.point); f && *f < threshold) {
        event = PollEvent::kSuccess;
        current = *minus.point;
        f_current = *f;
        w = w_minus;
      }
      if (event == PollEvent::kSuccess) current_ambient = *objective.last_lift();
      // Step size
      alpha = event == PollEvent::kSuccess ? std::min(cfg.alpha_max, cfg.gamma * alpha)
                                           : cfg.theta * alpha;
    }

    trace.iterations.push_back(
        IterationRecord{j, alpha_used, f_current, event, current.coords, frame.base.coords, w});
    if (observer) observer(trace.iterations.back());
    // Below the normal range, further steps cannot move the point.
    if (alpha < std::numeric_limits<double>::min()) break;
  }

  trace.final_point = current;
  trace.final_ambient = std::move(current_ambient);
  trace.final_objective = f_current;
  trace.final_alpha = alpha;
  trace.converged =
      m == 0 || check_convergence(trace, cfg.convergence_window, cfg.convergence_alpha);
  return trace;
}

bool check_convergence(const DescentTrace& trace, std::size_t window, double alpha_threshold) {
  const auto& its = trace.iterations;
  const std::size_t from = its.size() > window ? its.size() - window : 0;
  for (std::size_t i = from; i < its.size(); ++i) {
    if (its[i].event == PollEvent::kRebase) return false;
  }
  return trace.final_alpha < alpha_threshold;
}

}  // namespace whitneyopt
