#pragma once

#include <Eigen/Core>

namespace posefuse {

/// Wraps an angle to (-pi, pi].
double normalize_angle(double angle);

/// Element of the tangent space of SE(2): (translation, rotation).
struct Tangent3 {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  Eigen::Vector3d vector() const { return {dx, dy, dtheta}; }
  static Tangent3 from_vector(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Rigid planar pose. Heading is normalized on construction.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {}

  static Pose2 identity() { return {}; }

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Eigen::Vector2d translation() const { return {x_, y_}; }
  Eigen::Matrix2d rotation() const;
  Eigen::Matrix3d matrix() const;

  friend bool operator==(const Pose2&, const Pose2&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);
/// compose(inverse(a), b)
Pose2 between(const Pose2& a, const Pose2& b);

Tangent3 log_map(const Pose2& a);
Pose2 exp_map(const Tangent3& v);

/// Right retraction used by the solver: x (+) delta = x * exp(delta).
Pose2 retract(const Pose2& x, const Tangent3& delta);

/// Adjoint of `a` acting on tangent vectors ordered (dx, dy, dtheta).
Eigen::Matrix3d adjoint(const Pose2& a);

/// Inverse of the right Jacobian of the exponential map.
Eigen::Matrix3d right_jacobian_inverse(const Tangent3& v);

struct EdgeJacobians {
  Eigen::Matrix3d wrt_from;
  Eigen::Matrix3d wrt_to;
};

/// Relative-pose residual log(Zij^-1 (Xi^-1 Xj)).
Tangent3 edge_residual(const Pose2& xi, const Pose2& xj, const Pose2& zij);

/// Jacobians of edge_residual with respect to right perturbations of xi, xj.
EdgeJacobians edge_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& zij);

/// Position-only residual: (R_z^T (p_j - p_i - t_z), theta_j - theta_i - theta_z).
///
/// The translation difference is taken in the world frame (rotated into the
/// measurement frame), so neither node heading enters the position rows. Used
/// for GNSS constraints, whose heading row carries zero information.
Tangent3 position_residual(const Pose2& xi, const Pose2& xj, const Pose2& zij);
EdgeJacobians position_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& zij);

}  // namespace posefuse
