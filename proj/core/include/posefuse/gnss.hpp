#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "posefuse/odometry.hpp"

namespace posefuse {

/// A receiver fix in the local UTM frame.
struct GnssReading {
  double t = 0.0;
  double x = 0.0;    ///< easting offset (m)
  double y = 0.0;    ///< northing offset (m)
  double epx = 1.0;  ///< 95% easting bound (m)
  double epy = 1.0;  ///< 95% northing bound (m)
  double epv = 1.0;  ///< 95% vertical bound (m); parsed, never used in 2-D
  bool accepted = true;
};

/// diag((epx/2)^-2, (epy/2)^-2, 0). Throws InvalidArgument unless epx, epy > 0.
Eigen::Matrix3d gnss_information(const GnssReading& reading);

struct OutlierRejectionConfig {
  double max_heading_error_rad = 1.5 * std::numbers::pi / 180.0;
  double max_displacement_error_m = 15.0;
  /// Below this chord length bearings are undefined and only the
  /// displacement test applies.
  double min_bearing_displacement_m = 0.5;
  /// After this many consecutive readings that pass the displacement test
  /// but fail the heading test, the reference chord is presumed bad and is
  /// dropped; the next reading is then checked on displacement only. 0 keeps
  /// the reference forever.
  std::size_t heading_reset_streak = 5;
};

struct RejectionResult {
  std::vector<GnssReading> readings;  ///< input order, accepted flags set
  std::size_t rejected = 0;           ///< all rejections, including coverage
  std::size_t coverage_rejected = 0;  ///< rejected because odometry was missing
  double rejection_rate_percent = 0.0;
};

/// Checks each reading against the last accepted one using pre-integrated
/// odometry over the same span: the displacement difference must stay below
/// the displacement threshold and, once two accepted fixes exist, the change
/// of GNSS chord bearing must agree with the odometry-predicted change within
/// the heading threshold. The first reading is always accepted.
RejectionResult reject_outliers(std::span<const GnssReading> readings, std::span<const OdometrySample> odometry,
                                const OutlierRejectionConfig& config = {}, const OdometryModel& model = {});

}  // namespace posefuse
