#include "posefuse/se2.hpp"

#include <cmath>
#include <numbers>

namespace posefuse {

namespace {

constexpr double kSeriesThreshold = 1e-4;

// sin(t)/t
double sinc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// (1 - cos(t))/t
double cosc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return t / 2.0 - t * t2 / 24.0 + t * t2 * t2 / 720.0;
  }
  const double h = std::sin(0.5 * t);
  return 2.0 * h * h / t;
}

// (1 - cos(t))/t^2
double cosc2(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  const double h = std::sin(0.5 * t) / t;
  return 2.0 * h * h;
}

// (t - sin(t))/t^2, whose direct form cancels badly well beyond 1e-4.
double sinc2(double t) {
  if (std::abs(t) < 0.1) {
    const double t2 = t * t;
    return t * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 / 362880.0)));
  }
  return (t - std::sin(t)) / (t * t);
}

// (t/2) cot(t/2)
double half_cot(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 12.0 - t2 * t2 / 720.0;
  }
  const double h = 0.5 * t;
  return h * std::cos(h) / std::sin(h);
}

Eigen::Matrix2d rot(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

}  // namespace

double normalize_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) {
    r += 2.0 * std::numbers::pi;
  }
  return r;
}

Eigen::Matrix2d Pose2::rotation() const { return rot(theta_); }

Eigen::Matrix3d Pose2::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m(0, 2) = x_;
  m(1, 2) = y_;
  return m;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  return {a.x() + c * b.x() - s * b.y(), a.y() + s * b.x() + c * b.y(), a.theta() + b.theta()};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  return {-c * a.x() - s * a.y(), s * a.x() - c * a.y(), -a.theta()};
}

Pose2 between(const Pose2& a, const Pose2& b) { return compose(inverse(a), b); }

Tangent3 log_map(const Pose2& a) {
  const double theta = a.theta();
  const double k = half_cot(theta);
  const double h = 0.5 * theta;
  return {k * a.x() + h * a.y(), -h * a.x() + k * a.y(), theta};
}

Pose2 exp_map(const Tangent3& v) {
  const double a = sinc(v.dtheta);
  const double b = cosc(v.dtheta);
  return {a * v.dx - b * v.dy, b * v.dx + a * v.dy, v.dtheta};
}

Pose2 retract(const Pose2& x, const Tangent3& delta) { return compose(x, exp_map(delta)); }

Eigen::Matrix3d adjoint(const Pose2& a) {
  Eigen::Matrix3d ad = Eigen::Matrix3d::Identity();
  ad.topLeftCorner<2, 2>() = a.rotation();
  ad(0, 2) = a.y();
  ad(1, 2) = -a.x();
  return ad;
}

Eigen::Matrix3d right_jacobian_inverse(const Tangent3& v) {
  const double t = v.dtheta;
  const double a = sinc(t);
  const double b = cosc(t);
  const double p = sinc2(t);
  const double q = cosc2(t);
  // Right Jacobian is [[A, c], [0, 1]] with A = [[a, b], [-b, a]].
  const double c1 = v.dx * p - v.dy * q;
  const double c2 = v.dx * q + v.dy * p;
  const double det = a * a + b * b;
  Eigen::Matrix2d a_inv;
  a_inv << a, -b, b, a;
  a_inv /= det;

  Eigen::Matrix3d j = Eigen::Matrix3d::Identity();
  j.topLeftCorner<2, 2>() = a_inv;
  j.topRightCorner<2, 1>() = -a_inv * Eigen::Vector2d(c1, c2);
  return j;
}

Tangent3 edge_residual(const Pose2& xi, const Pose2& xj, const Pose2& zij) {
  return log_map(compose(inverse(zij), between(xi, xj)));
}

EdgeJacobians edge_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& zij) {
  const Tangent3 e = edge_residual(xi, xj, zij);
  const Eigen::Matrix3d jr_inv = right_jacobian_inverse(e);
  return {-jr_inv * adjoint(between(xj, xi)), jr_inv};
}

Tangent3 position_residual(const Pose2& xi, const Pose2& xj, const Pose2& zij) {
  const Eigen::Vector2d d = zij.rotation().transpose() * (xj.translation() - xi.translation() - zij.translation());
  return {d.x(), d.y(), normalize_angle(xj.theta() - xi.theta() - zij.theta())};
}

EdgeJacobians position_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& zij) {
  const Eigen::Matrix2d rz_t = zij.rotation().transpose();
  EdgeJacobians jac;
  jac.wrt_to.setZero();
  jac.wrt_to.topLeftCorner<2, 2>() = rz_t * xj.rotation();
  jac.wrt_to(2, 2) = 1.0;
  jac.wrt_from.setZero();
  jac.wrt_from.topLeftCorner<2, 2>() = -rz_t * xi.rotation();
  jac.wrt_from(2, 2) = -1.0;
  return jac;
}

}  // namespace posefuse
