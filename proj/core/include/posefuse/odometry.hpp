#pragma once

#include <span>

#include <Eigen/Core>

#include "posefuse/se2.hpp"

namespace posefuse {

/// One CAN odometry record.
struct OdometrySample {
  double t = 0.0;         ///< seconds
  double yaw_rate = 0.0;  ///< rad/s
  double velocity = 0.0;  ///< m/s
};

/// Noise model and stream expectations for pre-integrated odometry.
struct OdometryModel {
  /// Positional drift as a fraction of distance travelled.
  double drift_fraction = 0.011;
  /// Length scale turning positional drift into heading drift (m).
  double heading_length_scale = 2.7;
  /// Information assigned to every axis at standstill; also the upper bound
  /// for any diagonal information entry.
  double standstill_information = 1e5;
  /// Nominal sample rate; gaps longer than two periods are coverage errors.
  double sample_rate_hz = 25.0;
};

struct PreintegratedOdometry {
  double t_start = 0.0;
  double t_end = 0.0;
  Pose2 delta;                  ///< relative pose from t_start to t_end
  double heading_change = 0.0;  ///< integrated yaw rate (rad), not wrapped
  double arc_length = 0.0;      ///< integrated |velocity| (m)
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
};

/// Integrates the stream over [t_start, t_end]. Each sample interval uses the
/// mean of its endpoint signals and the midpoint-heading rule; endpoints
/// falling between samples are linearly interpolated.
///
/// Throws InvalidArgument if t_end <= t_start and InsufficientCoverage if the
/// stream does not span the window or has a gap longer than two periods.
PreintegratedOdometry preintegrate(std::span<const OdometrySample> samples, double t_start, double t_end,
                                   const OdometryModel& model = {});

/// diag(sigma_pos^-2, sigma_pos^-2, sigma_theta^-2) with sigma_pos =
/// drift * arc and sigma_theta = sigma_pos / L; the standstill lock applies at
/// zero arc length and caps every entry.
Eigen::Matrix3d odometry_information(const PreintegratedOdometry& pre, const OdometryModel& model = {});

/// Covariance consistent with odometry_information.
Eigen::Matrix3d odometry_covariance(double arc_length, const OdometryModel& model = {});

/// Throws NonMonotonicTimestamps unless timestamps strictly increase, and
/// InvalidArgument on non-finite values.
void validate_stream(std::span<const OdometrySample> samples);

}  // namespace posefuse
