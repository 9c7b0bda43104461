#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posefuse/dataset.hpp"
#include "posefuse/metrics.hpp"

namespace posefuse {

enum class TrajectoryProfile { Straight, UrbanLoop, Highway };

std::string_view to_string(TrajectoryProfile profile);
TrajectoryProfile parse_profile(std::string_view text);

/// GNSS = truth + bias + AR(1) noise (per axis) + sparse outlier jumps.
struct GnssErrorModel {
  PlanarPoint bias;
  double ar1_rho = 0.0;
  double ar1_sigma = 0.0;  ///< innovation standard deviation per axis (m)
  double outlier_rate = 0.0;
  double outlier_magnitude = 50.0;  ///< jump length (m), random direction
};

/// Per-axis stationary standard deviation of the AR(1) process.
double ar1_stationary_sigma(double rho, double innovation_sigma);

/// Innovation sigma giving a two-axis dispersion (precision metric) of
/// `precision` for an isotropic AR(1) process.
double ar1_sigma_for_precision(double precision, double rho);

struct OdometryErrorModel {
  /// Standard deviation of the multiplicative scale errors on velocity and
  /// yaw rate: a constant per-run factor plus independent per-sample noise.
  double drift_fraction = 0.0;
};

struct Standstill {
  double start_s = 0.0;
  double duration_s = 0.0;
};

struct SyntheticOptions {
  double duration_s = 600.0;  ///< GNSS fixes at 0, 1, ..., duration_s
  double odometry_rate_hz = 25.0;
  std::optional<Standstill> standstill;
  PlanarPoint utm_base{691650.0, 5334754.0};
  std::string utm_zone = "32N";
  /// Lower bound on the reported 1-sigma accuracy (epx/2).
  double min_reported_sigma = 0.05;
};

struct SyntheticDataset {
  Dataset dataset;
  /// Per GNSS reading: whether an outlier jump was injected.
  std::vector<bool> injected_outlier;
};

/// Deterministic for a fixed seed. Truth is the exact kinematic trajectory of
/// the clean velocity/yaw-rate signals at the odometry rate, integrated with
/// the same rule as preintegrate(); truth fixes are emitted at every GNSS
/// timestamp.
SyntheticDataset generate_synthetic(std::uint64_t seed, TrajectoryProfile profile, const GnssErrorModel& gnss_error,
                                    const OdometryErrorModel& odo_error, const SyntheticOptions& options = {});

}  // namespace posefuse
