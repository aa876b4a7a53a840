#include "whitneyopt/geodesic.hpp"

#include <cmath>

#include "whitneyopt/error.hpp"

namespace whitneyopt {

Vector ChristoffelTensor::contract(const Vector& v) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      for (std::size_t k = 0; k < dim_; ++k) {
        acc += (*this)(i, j, k) * v(static_cast<Eigen::Index>(j)) * v(static_cast<Eigen::Index>(k));
      }
    }
    out(static_cast<Eigen::Index>(i)) = acc;
  }
  return out;
}

ChristoffelTensor christoffel(const ConstraintSet& g, const ReducedPoint& p) {
  const std::size_t d = g.dimension();
  const Matrix pinv = regular_pseudoinverse(g.jacobian(p.coords));
  ChristoffelTensor gamma(d);
  for (std::size_t c = 0; c < g.count(); ++c) {
    const Matrix h = g.hessian(c, p.coords);
    for (std::size_t i = 0; i < d; ++i) {
      const double weight = pinv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      if (weight == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          gamma(i, j, k) += weight * h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        }
      }
    }
  }
  return gamma;
}

GeodesicState geodesic_integrate(const ConstraintSet& g, const GeodesicState& start,
                                 double duration, double step, const ProjectionConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(g.dimension());
  if (start.position.size() != d || start.velocity.size() != d) {
    throw Error(ErrorCode::kInvalidArgument, "geodesic state has the wrong dimension");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "geodesic step must be positive");
  if (duration == 0.0) return start;

  const auto steps = static_cast<long>(std::ceil(std::abs(duration) / step));
  const double h = duration / static_cast<double>(steps);
  const double speed_limit = 1e3 * start.velocity.norm();

  auto accel = [&](const Vector& z, const Vector& v) -> Vector {
    return -christoffel(g, ReducedPoint{z}).contract(v);
  };

  Vector z = start.position;
  Vector v = start.velocity;
  for (long n = 0; n < steps; ++n) {
    const Vector k1z = v;
    const Vector k1v = accel(z, v);
    const Vector k2z = v + 0.5 * h * k1v;
    const Vector k2v = accel(z + 0.5 * h * k1z, k2z);
    const Vector k3z = v + 0.5 * h * k2v;
    const Vector k3v = accel(z + 0.5 * h * k2z, k3z);
    const Vector k4z = v + h * k3v;
    const Vector k4v = accel(z + h * k3z, k4z);
    z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!v.allFinite() || !z.allFinite() || v.norm() > speed_limit) {
      throw Error(ErrorCode::kDiverged, "geodesic velocity blew up");
    }
  }

  const TangentFrame frame = tangent_frame(g, ReducedPoint{z});
  const Vector zero = Vector::Zero(frame.tangent_basis.cols());
  const ProjectionResult projected = project_to_manifold(g, frame, zero, cfg);
  if (!projected.ok()) {
    throw Error(ErrorCode::kDiverged, "geodesic endpoint could not be projected onto the manifold");
  }
  return GeodesicState{projected.point->coords, v, start.time + duration};
}

}  // namespace whitneyopt
