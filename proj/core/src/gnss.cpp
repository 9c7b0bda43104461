#include "posefuse/gnss.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

Eigen::Matrix3d gnss_information(const GnssReading& reading) {
  if (!(reading.epx > 0.0) || !(reading.epy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("GNSS accuracies must be positive (epx={}, epy={})", reading.epx, reading.epy));
  }
  const double sx = reading.epx / 2.0;
  const double sy = reading.epy / 2.0;
  return Eigen::Vector3d(1.0 / (sx * sx), 1.0 / (sy * sy), 0.0).asDiagonal();
}

namespace {

// Difference between the GNSS and odometry bearing change over two successive
// displacement vectors, or nullopt when a chord is too short for a bearing.
std::optional<double> turn_error(const Eigen::Vector2d& first_chord, const PreintegratedOdometry& first_odo,
                                 const Eigen::Vector2d& second_chord, const PreintegratedOdometry& second_odo,
                                 double min_len) {
  if (first_chord.norm() < min_len || second_chord.norm() < min_len ||
      first_odo.delta.translation().norm() < min_len || second_odo.delta.translation().norm() < min_len) {
    return std::nullopt;
  }
  const double gnss_turn =
      std::atan2(second_chord.y(), second_chord.x()) - std::atan2(first_chord.y(), first_chord.x());
  // Bearing of each odometry chord, expressed in the frame at the start of the first one.
  const double odo_turn = first_odo.delta.theta() + std::atan2(second_odo.delta.y(), second_odo.delta.x()) -
                          std::atan2(first_odo.delta.y(), first_odo.delta.x());
  return normalize_angle(gnss_turn - odo_turn);
}

}  // namespace

RejectionResult reject_outliers(std::span<const GnssReading> readings, std::span<const OdometrySample> odometry,
                                const OutlierRejectionConfig& config, const OdometryModel& model) {
  RejectionResult result;
  result.readings.assign(readings.begin(), readings.end());
  if (result.readings.empty()) {
    return result;
  }
  for (std::size_t i = 1; i < readings.size(); ++i) {
    if (!(readings[i].t > readings[i - 1].t)) {
      throw Error(ErrorCode::NonMonotonicTimestamps, fmt::format("GNSS reading {} at t={}", i, readings[i].t));
    }
  }

  struct Anchor {
    std::size_t index;
    std::optional<PreintegratedOdometry> arriving;  // odometry from the previous anchor
  };

  const double min_len = config.min_bearing_displacement_m;
  result.readings.front().accepted = true;
  Anchor prev{0, std::nullopt};
  std::optional<Anchor> prev_prev;
  std::size_t heading_streak = 0;
  // Set when the backward reference chord was dropped after a streak; the
  // next candidate is then checked against the chord to its successor.
  bool reference_dropped = false;

  for (std::size_t i = 1; i < result.readings.size(); ++i) {
    GnssReading& cur = result.readings[i];
    const GnssReading& p = result.readings[prev.index];

    PreintegratedOdometry odo;
    try {
      odo = preintegrate(odometry, p.t, cur.t, model);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientCoverage) throw;
      cur.accepted = false;
      ++result.rejected;
      ++result.coverage_rejected;
      continue;
    }

    const Eigen::Vector2d chord(cur.x - p.x, cur.y - p.y);
    bool ok = std::abs(chord.norm() - odo.delta.translation().norm()) < config.max_displacement_error_m;

    if (ok && prev_prev && prev.arriving) {
      const GnssReading& pp = result.readings[prev_prev->index];
      const Eigen::Vector2d last_chord(p.x - pp.x, p.y - pp.y);
      if (auto err = turn_error(last_chord, *prev.arriving, chord, odo, min_len)) {
        ok = std::abs(*err) < config.max_heading_error_rad;
        if (!ok && config.heading_reset_streak > 0 && ++heading_streak >= config.heading_reset_streak) {
          prev_prev.reset();
          heading_streak = 0;
          reference_dropped = true;
        }
      }
    } else if (ok && reference_dropped && i + 1 < result.readings.size()) {
      const GnssReading& next = result.readings[i + 1];
      try {
        const PreintegratedOdometry ahead = preintegrate(odometry, cur.t, next.t, model);
        const Eigen::Vector2d next_chord(next.x - cur.x, next.y - cur.y);
        ok = std::abs(next_chord.norm() - ahead.delta.translation().norm()) < config.max_displacement_error_m;
        if (auto err = turn_error(chord, odo, next_chord, ahead, min_len); ok && err) {
          ok = std::abs(*err) < config.max_heading_error_rad;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientCoverage) throw;
      }
    }

    cur.accepted = ok;
    if (ok) {
      prev_prev = prev;
      prev = Anchor{i, odo};
      heading_streak = 0;
      reference_dropped = false;
    } else {
      ++result.rejected;
    }
  }

  result.rejection_rate_percent =
      100.0 * static_cast<double>(result.rejected) / static_cast<double>(result.readings.size());
  return result;
}

}  // namespace posefuse
