#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "whitneyopt/polynomial.hpp"
#include "whitneyopt/triangular.hpp"

namespace whitneyopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates on the reduced manifold, indexed by WhitneyPartition::retained.
struct ReducedPoint {
  Vector coords;
};

/// Coordinates over every variable of the source order.
struct AmbientPoint {
  Vector coords;
};

struct ProjectionConfig {
  double residual_tol = 1e-10;
  int max_iters = 50;
  double oracle_radius = 0.5;
  double divergence_factor = 1e6;

  /// Throws Error(kInvalidArgument) unless every field is positive.
  void validate() const;
};

/// Polynomial constraints over one coordinate system, with exact first and
/// second partials compiled for evaluation.
class ConstraintSet {
 public:
  ConstraintSet(VariableOrder order, std::vector<Polynomial> polys);
  /// Takes the order from the first polynomial; `polys` must be nonempty.
  explicit ConstraintSet(std::vector<Polynomial> polys);
  /// The g_star block over the retained coordinates.
  static ConstraintSet reduced(const WhitneyPartition& part);

  const VariableOrder& order() const { return order_; }
  const std::vector<Polynomial>& polynomials() const { return polys_; }
  std::size_t dimension() const { return order_.size(); }
  std::size_t count() const { return polys_.size(); }
  /// Dimension of the zero set at regular points.
  std::size_t manifold_dim() const { return dimension() - count(); }

  Vector residuals(const Vector& z) const;
  double max_residual(const Vector& z) const;
  Matrix jacobian(const Vector& z) const;
  /// Hessian of constraint c.
  Matrix hessian(std::size_t c, const Vector& z) const;

 private:
  VariableOrder order_;
  std::vector<Polynomial> polys_;
  std::vector<CompiledPolynomial> values_;
  std::vector<CompiledPolynomial> gradient_;  // count x dim, row major
  std::vector<CompiledPolynomial> hessian_;   // count x dim x dim
};

/// Rows are constraints, columns are coordinates.
Matrix jacobian(const ConstraintSet& g, const ReducedPoint& p);

/// Tangent basis and chord operator at a base point.
struct TangentFrame {
  ReducedPoint base;
  Matrix tangent_basis;  // d x m, orthonormal columns spanning null(J)
  Matrix pseudoinverse;  // d x (d - m), Moore-Penrose inverse of J
};

/// Throws Error(kNotRegular) when the Jacobian's numerical rank is below the
/// number of constraints.
TangentFrame tangent_frame(const ConstraintSet& g, const ReducedPoint& p);

/// Pseudoinverse of a full-row-rank matrix; throws Error(kNotRegular) otherwise.
Matrix regular_pseudoinverse(const Matrix& jac);

enum class ProjectionStatus {
  kConverged,
  kIterationLimit,
  kLeftOracleRadius,
  kDiverged,
};

struct ProjectionResult {
  ProjectionStatus status;
  std::optional<ReducedPoint> point;  // set iff status == kConverged
  int iterations;
  double residual;

  bool ok() const { return status == ProjectionStatus::kConverged; }
};

/// Chord iteration q <- q - N g(q) from q0 = base + U w, with N frozen at the
/// base. A non-converged status is the oracle rejecting the step.
ProjectionResult project_to_manifold(const ConstraintSet& g, const TangentFrame& frame,
                                     const Vector& w, const ProjectionConfig& cfg);

/// Solves the elimination cascade for the eliminated block.
class Lifter {
 public:
  explicit Lifter(const WhitneyPartition& part);

  /// `warm`, when given, has one entry per eliminated variable; among several
  /// real roots the one nearest warm[j] (or 0) is chosen.
  /// Throws Error(kNoRealRoot) or Error(kAmbiguousRoot).
  AmbientPoint operator()(const ReducedPoint& p, const std::optional<Vector>& warm,
                          const ProjectionConfig& cfg) const;

  const WhitneyPartition& partition() const { return *part_; }

 private:
  struct Term {
    double coefficient;
    std::uint32_t main_power;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> powers;  // ambient var, exponent
  };
  std::shared_ptr<const WhitneyPartition> part_;
  std::vector<std::vector<Term>> cascade_;
  std::vector<std::uint32_t> degrees_;
};

AmbientPoint lift(const WhitneyPartition& part, const ReducedPoint& p,
                  const std::optional<Vector>& warm, const ProjectionConfig& cfg);

/// Extracts the eliminated block of an ambient point in elimination order.
Vector eliminated_values(const WhitneyPartition& part, const AmbientPoint& z);

using AmbientObjective = std::function<double(const AmbientPoint&)>;

/// f composed with the lift. Each successful evaluation becomes the warm
/// start for the next one.
class PulledBackObjective {
 public:
  PulledBackObjective(const WhitneyPartition& part, AmbientObjective f, ProjectionConfig cfg);

  /// nullopt when the lift fails at p.
  std::optional<double> operator()(const ReducedPoint& p);

  const std::optional<AmbientPoint>& last_lift() const { return last_lift_; }
  const Lifter& lifter() const { return lifter_; }

 private:
  Lifter lifter_;
  AmbientObjective f_;
  ProjectionConfig cfg_;
  std::optional<Vector> warm_;
  std::optional<AmbientPoint> last_lift_;
};

PulledBackObjective pullback_objective(AmbientObjective f, const WhitneyPartition& part,
                                       const ProjectionConfig& cfg = {});

/// Objective given by a polynomial over the partition's full order.
AmbientObjective polynomial_objective(const Polynomial& f);

/// Largest |residual| of the source constraints at z.
double max_source_residual(const WhitneyPartition& part, const AmbientPoint& z);

}  // namespace whitneyopt
