#include "posefuse/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStopRamp = 5.0;
constexpr double kUrbanSpeed = 7.0;

struct Signals {
  double velocity;
  double yaw_rate;
};

// 1 while driving, 0 while stopped, cosine ramps of kStopRamp seconds.
double stop_envelope(double t, double start, double duration) {
  const double end = start + duration;
  if (t <= start - kStopRamp || t >= end + kStopRamp) return 1.0;
  if (t >= start && t <= end) return 0.0;
  if (t < start) return 0.5 * (1.0 + std::cos(kPi * (t - (start - kStopRamp)) / kStopRamp));
  return 0.5 * (1.0 - std::cos(kPi * (t - end) / kStopRamp));
}

Signals profile_signals(TrajectoryProfile profile, double t) {
  switch (profile) {
    case TrajectoryProfile::Straight:
      return {15.0, 0.0};
    case TrajectoryProfile::UrbanLoop: {
      // 60 s blocks: straight run, then a smooth 90 degree left turn; every
      // third block ends with a short stop before the turn.
      constexpr double kBlock = 60.0;
      constexpr double kTurnStart = 44.0;
      constexpr double kTurnLength = 8.0;
      const double block = std::floor(t / kBlock);
      const double tau = t - block * kBlock;
      double omega = 0.0;
      if (tau >= kTurnStart && tau <= kTurnStart + kTurnLength) {
        const double u = (tau - kTurnStart) / kTurnLength;
        omega = (kPi / 2.0) / kTurnLength * (1.0 - std::cos(2.0 * kPi * u));
      }
      double env = 1.0;
      if (static_cast<long>(block) % 3 == 2) {
        env = stop_envelope(tau, 30.0, 6.0);
      }
      return {kUrbanSpeed * env, omega * env};
    }
    case TrajectoryProfile::Highway:
      return {25.0 + 2.0 * std::sin(2.0 * kPi * t / 300.0), 0.02 * std::sin(2.0 * kPi * t / 150.0)};
  }
  return {0.0, 0.0};
}

double initial_heading(TrajectoryProfile profile) {
  switch (profile) {
    case TrajectoryProfile::Straight: return 0.3;
    case TrajectoryProfile::UrbanLoop: return 0.0;
    case TrajectoryProfile::Highway: return -0.8;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(TrajectoryProfile profile) {
  switch (profile) {
    case TrajectoryProfile::Straight: return "straight";
    case TrajectoryProfile::UrbanLoop: return "urban";
    case TrajectoryProfile::Highway: return "highway";
  }
  return "straight";
}

TrajectoryProfile parse_profile(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "straight") return TrajectoryProfile::Straight;
  if (s == "urban" || s == "urbanloop" || s == "urban-loop") return TrajectoryProfile::UrbanLoop;
  if (s == "highway") return TrajectoryProfile::Highway;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown profile '{}'", text));
}

double ar1_stationary_sigma(double rho, double innovation_sigma) {
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "AR(1) coefficient must satisfy |rho| < 1");
  }
  return innovation_sigma / std::sqrt(1.0 - rho * rho);
}

double ar1_sigma_for_precision(double precision, double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "AR(1) coefficient must satisfy |rho| < 1");
  }
  return precision / std::numbers::sqrt2 * std::sqrt(1.0 - rho * rho);
}

SyntheticDataset generate_synthetic(std::uint64_t seed, TrajectoryProfile profile, const GnssErrorModel& gnss_error,
                                    const OdometryErrorModel& odo_error, const SyntheticOptions& options) {
  if (!(options.duration_s >= 1.0) || !(options.odometry_rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "synthetic duration and rate must be positive");
  }
  if (gnss_error.outlier_rate < 0.0 || gnss_error.outlier_rate > 1.0 || gnss_error.ar1_sigma < 0.0 ||
      odo_error.drift_fraction < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "invalid synthetic error parameters");
  }
  const double stationary = ar1_stationary_sigma(gnss_error.ar1_rho, gnss_error.ar1_sigma);

  std::seed_seq odo_seq{seed, std::uint64_t{0x0d0}};
  std::seed_seq gnss_seq{seed, std::uint64_t{0x6e55}};
  std::mt19937_64 odo_rng(odo_seq);
  std::mt19937_64 gnss_rng(gnss_seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SyntheticDataset out;
  Dataset& d = out.dataset;
  d.name = fmt::format("synth-{}-{}", to_string(profile), seed);
  d.utm_zone = options.utm_zone;

  // Clean and measured signals on the odometry grid.
  const auto samples = static_cast<std::size_t>(std::llround(options.duration_s * options.odometry_rate_hz));
  const auto per_fix = static_cast<std::size_t>(std::llround(options.odometry_rate_hz));
  std::vector<OdometrySample> clean(samples + 1);
  d.odometry.resize(samples + 1);
  const double scale_v = odo_error.drift_fraction * normal(odo_rng);
  const double scale_w = odo_error.drift_fraction * normal(odo_rng);
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / options.odometry_rate_hz;
    Signals s = profile_signals(profile, t);
    if (options.standstill) {
      const double env = stop_envelope(t, options.standstill->start_s, options.standstill->duration_s);
      s.velocity *= env;
      s.yaw_rate *= env;
    }
    clean[i] = {t, s.yaw_rate, s.velocity};
    const double nv = odo_error.drift_fraction * normal(odo_rng);
    const double nw = odo_error.drift_fraction * normal(odo_rng);
    d.odometry[i] = {t, s.yaw_rate * (1.0 + scale_w + nw), s.velocity * (1.0 + scale_v + nv)};
  }

  // Truth at fix times, by the same per-interval rule used for pre-integration.
  std::vector<Pose2> truth;
  Pose2 pose(0.0, 0.0, initial_heading(profile));
  truth.push_back(pose);
  for (std::size_t i = 0; i < samples; ++i) {
    const OdometrySample& a = clean[i];
    const OdometrySample& b = clean[i + 1];
    const double dt = b.t - a.t;
    const double omega = 0.5 * (a.yaw_rate + b.yaw_rate);
    const double v = 0.5 * (a.velocity + b.velocity);
    const double half = 0.5 * omega * dt;
    pose = compose(pose, Pose2(v * dt * std::cos(half), v * dt * std::sin(half), omega * dt));
    if ((i + 1) % per_fix == 0) truth.push_back(pose);
  }

  const double reported = std::max(stationary, options.min_reported_sigma);
  double ex = stationary * normal(gnss_rng);
  double ey = stationary * normal(gnss_rng);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (k > 0) {
      ex = gnss_error.ar1_rho * ex + gnss_error.ar1_sigma * normal(gnss_rng);
      ey = gnss_error.ar1_rho * ey + gnss_error.ar1_sigma * normal(gnss_rng);
    }
    const double t = static_cast<double>(k);
    const double ax = options.utm_base.x + truth[k].x();
    const double ay = options.utm_base.y + truth[k].y();
    d.truth.push_back({t, ax, ay});

    GnssReading r;
    r.t = t;
    r.x = ax + gnss_error.bias.x + ex;
    r.y = ay + gnss_error.bias.y + ey;
    r.epx = 2.0 * reported;
    r.epy = 2.0 * reported;
    r.epv = 3.0 * reported;
    // The first two fixes anchor the chain and are never corrupted.
    const bool jump = k >= 2 && gnss_error.outlier_rate > 0.0 && uniform(gnss_rng) < gnss_error.outlier_rate;
    if (jump) {
      const double dir = 2.0 * kPi * uniform(gnss_rng);
      r.x += gnss_error.outlier_magnitude * std::cos(dir);
      r.y += gnss_error.outlier_magnitude * std::sin(dir);
    }
    out.injected_outlier.push_back(jump);
    d.gnss.push_back(r);
  }

  d.frame_origin = {d.gnss.front().x, d.gnss.front().y};
  for (GnssReading& r : d.gnss) {
    r.x -= d.frame_origin.x;
    r.y -= d.frame_origin.y;
  }
  for (TruthFix& f : d.truth) {
    f.x -= d.frame_origin.x;
    f.y -= d.frame_origin.y;
  }
  return out;
}

}  // namespace posefuse
