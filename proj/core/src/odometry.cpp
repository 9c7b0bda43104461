#include "posefuse/odometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

double lerp(double a, double b, double w) { return a + (b - a) * w; }

struct Signal {
  double yaw_rate;
  double velocity;
};

Signal interpolate(const OdometrySample& a, const OdometrySample& b, double t) {
  const double w = (t - a.t) / (b.t - a.t);
  return {lerp(a.yaw_rate, b.yaw_rate, w), lerp(a.velocity, b.velocity, w)};
}

}  // namespace

void validate_stream(std::span<const OdometrySample> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const OdometrySample& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.yaw_rate) || !std::isfinite(s.velocity)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("odometry sample {} is not finite", i));
    }
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      throw Error(ErrorCode::NonMonotonicTimestamps, fmt::format("odometry sample {} at t={}", i, s.t));
    }
  }
}

PreintegratedOdometry preintegrate(std::span<const OdometrySample> samples, double t_start, double t_end,
                                   const OdometryModel& model) {
  if (!(t_end > t_start)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("empty window [{}, {}]", t_start, t_end));
  }
  if (samples.size() < 2 || t_start < samples.front().t || t_end > samples.back().t) {
    throw Error(ErrorCode::InsufficientCoverage,
                fmt::format("odometry does not cover [{}, {}]", t_start, t_end));
  }
  const double max_gap = 2.0 / model.sample_rate_hz * (1.0 + 1e-6);

  // First interval [s_k, s_k+1] containing t_start with s_k <= t_start.
  auto it = std::upper_bound(samples.begin(), samples.end(), t_start,
                             [](double t, const OdometrySample& s) { return t < s.t; });
  std::size_t k = static_cast<std::size_t>(std::distance(samples.begin(), it)) - 1;
  if (k + 1 >= samples.size()) {
    k = samples.size() - 2;
  }

  PreintegratedOdometry out;
  out.t_start = t_start;
  out.t_end = t_end;
  double x = 0.0, y = 0.0, heading = 0.0;

  for (; k + 1 < samples.size(); ++k) {
    const OdometrySample& a = samples[k];
    const OdometrySample& b = samples[k + 1];
    if (a.t >= t_end) {
      break;
    }
    if (b.t - a.t > max_gap) {
      throw Error(ErrorCode::InsufficientCoverage,
                  fmt::format("odometry gap of {} s at t={}", b.t - a.t, a.t));
    }
    const double lo = std::max(a.t, t_start);
    const double hi = std::min(b.t, t_end);
    const double dt = hi - lo;
    if (dt <= 0.0) {
      continue;
    }
    const Signal s0 = lo == a.t ? Signal{a.yaw_rate, a.velocity} : interpolate(a, b, lo);
    const Signal s1 = hi == b.t ? Signal{b.yaw_rate, b.velocity} : interpolate(a, b, hi);
    const double omega = 0.5 * (s0.yaw_rate + s1.yaw_rate);
    const double v = 0.5 * (s0.velocity + s1.velocity);

    const double dtheta = omega * dt;
    const double mid = heading + 0.5 * dtheta;
    x += v * dt * std::cos(mid);
    y += v * dt * std::sin(mid);
    heading += dtheta;
    out.heading_change += dtheta;
    out.arc_length += std::abs(v) * dt;
  }

  out.delta = Pose2(x, y, heading);
  out.covariance = odometry_covariance(out.arc_length, model);
  return out;
}

Eigen::Matrix3d odometry_covariance(double arc_length, const OdometryModel& model) {
  const double floor = 1.0 / model.standstill_information;
  const double sigma_pos = model.drift_fraction * arc_length;
  const double sigma_theta = sigma_pos / model.heading_length_scale;
  const double var_pos = std::max(sigma_pos * sigma_pos, floor);
  const double var_theta = std::max(sigma_theta * sigma_theta, floor);
  return Eigen::Vector3d(var_pos, var_pos, var_theta).asDiagonal();
}

Eigen::Matrix3d odometry_information(const PreintegratedOdometry& pre, const OdometryModel& model) {
  // Built directly rather than by inverting the covariance so the standstill
  // lock comes out exactly.
  const double cap = model.standstill_information;
  const double sigma_pos = model.drift_fraction * pre.arc_length;
  const double sigma_theta = sigma_pos / model.heading_length_scale;
  const auto info = [cap](double sigma) { return sigma > 0.0 ? std::min(1.0 / (sigma * sigma), cap) : cap; };
  const double pos = info(sigma_pos);
  return Eigen::Vector3d(pos, pos, info(sigma_theta)).asDiagonal();
}

}  // namespace posefuse
