#pragma once

#include <cstddef>
#include <vector>

#include "whitneyopt/geometry.hpp"

namespace whitneyopt {

/// Gamma^i_{jk} at a point, stored densely as [i][j][k].
class ChristoffelTensor {
 public:
  explicit ChristoffelTensor(std::size_t dim) : dim_(dim), data_(dim * dim * dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dim_ + j) * dim_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dim_ + j) * dim_ + k];
  }
  /// Vector with entries Gamma^i_{jk} v^j v^k.
  Vector contract(const Vector& v) const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Pseudoinverse rows of the constraint Jacobian contracted against each
/// constraint's Hessian. Throws Error(kNotRegular) at singular points.
ChristoffelTensor christoffel(const ConstraintSet& g, const ReducedPoint& p);

struct GeodesicState {
  Vector position;
  Vector velocity;
  double time = 0.0;
};

/// Fixed-step RK4 on z'' = -Gamma(z)[z', z'], followed by projection of the
/// final position back onto the constraint set. Negative durations integrate
/// backwards. Throws Error(kNotRegular) or Error(kDiverged).
GeodesicState geodesic_integrate(const ConstraintSet& g, const GeodesicState& start,
                                 double duration, double step, const ProjectionConfig& cfg = {});

}  // namespace whitneyopt
