#include "posefuse/graph_builders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kMinBearingChord = 0.5;
constexpr double kTimeMergeTolerance = 1e-9;

std::vector<GnssReading> accepted_only(std::span<const GnssReading> readings, std::vector<std::size_t>* indices) {
  std::vector<GnssReading> out;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (readings[i].accepted) {
      out.push_back(readings[i]);
      if (indices) indices->push_back(i);
    }
  }
  return out;
}

double initial_heading(std::span<const GnssReading> readings, std::span<const OdometrySample> odometry,
                       const OdometryModel& model) {
  const GnssReading& first = readings.front();
  for (std::size_t k = 1; k < readings.size(); ++k) {
    const double dx = readings[k].x - first.x;
    const double dy = readings[k].y - first.y;
    if (std::hypot(dx, dy) < kMinBearingChord) {
      continue;
    }
    const PreintegratedOdometry odo = preintegrate(odometry, first.t, readings[k].t, model);
    if (odo.delta.translation().norm() < kMinBearingChord) {
      continue;
    }
    return normalize_angle(std::atan2(dy, dx) - std::atan2(odo.delta.y(), odo.delta.x()));
  }
  return 0.0;
}

std::vector<double> node_timeline(std::span<const GnssReading> accepted, std::span<const OdometrySample> odometry,
                                  NodeRate rate) {
  std::vector<double> times;
  times.reserve(accepted.size());
  for (const GnssReading& r : accepted) times.push_back(r.t);
  if (rate == NodeRate::PerGnssFix) {
    return times;
  }
  const double lo = times.front();
  const double hi = times.back();
  for (const OdometrySample& s : odometry) {
    if (s.t > lo && s.t < hi) times.push_back(s.t);
  }
  std::sort(times.begin(), times.end());
  std::vector<double> merged;
  for (double t : times) {
    if (merged.empty() || t - merged.back() > kTimeMergeTolerance) merged.push_back(t);
  }
  return merged;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::G1: return "G1";
    case Strategy::G2: return "G2";
    case Strategy::G3: return "G3";
  }
  return "G2";
}

Strategy parse_strategy(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "g1") return Strategy::G1;
  if (s == "g2") return Strategy::G2;
  if (s == "g3") return Strategy::G3;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown strategy '{}'", text));
}

void BuilderConfig::validate() const {
  if (!(identity_edge_strength > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "identity_edge_strength must be positive");
  }
}

std::vector<Pose2> initialize_from_odometry(std::span<const GnssReading> readings,
                                            std::span<const OdometrySample> odometry,
                                            std::span<const double> node_times, const OdometryModel& model) {
  if (readings.empty() || node_times.empty()) {
    throw Error(ErrorCode::TooFewReadings, "no readings to initialize from");
  }
  std::vector<Pose2> poses;
  poses.reserve(node_times.size());
  poses.emplace_back(readings.front().x, readings.front().y, initial_heading(readings, odometry, model));
  for (std::size_t k = 1; k < node_times.size(); ++k) {
    const PreintegratedOdometry odo = preintegrate(odometry, node_times[k - 1], node_times[k], model);
    poses.push_back(compose(poses.back(), odo.delta));
  }
  return poses;
}

std::vector<Pose2> initialize_from_odometry(std::span<const GnssReading> readings,
                                            std::span<const OdometrySample> odometry, const OdometryModel& model) {
  const std::vector<GnssReading> accepted = accepted_only(readings, nullptr);
  if (accepted.size() < 2) {
    throw Error(ErrorCode::TooFewReadings, "need at least two accepted readings");
  }
  std::vector<double> times;
  for (const GnssReading& r : accepted) times.push_back(r.t);
  return initialize_from_odometry(accepted, odometry, times, model);
}

BuiltGraph build(std::span<const GnssReading> readings, std::span<const OdometrySample> odometry,
                 const BuilderConfig& config) {
  config.validate();
  BuiltGraph out;
  const std::vector<GnssReading> accepted = accepted_only(readings, &out.reading_indices);
  if (accepted.size() < 2) {
    throw Error(ErrorCode::TooFewReadings,
                fmt::format("need at least two accepted GNSS readings, got {}", accepted.size()));
  }

  const std::vector<double> times = node_timeline(accepted, odometry, config.node_rate);
  const std::vector<Pose2> seeds = initialize_from_odometry(accepted, odometry, times, config.odometry);

  PoseGraph& g = out.graph;
  out.origin = g.add_node(Pose2::identity(), true, NodeKind::UtmOrigin);

  out.vehicle_times = times;
  for (const Pose2& p : seeds) {
    out.vehicle_nodes.push_back(g.add_node(p, false, NodeKind::VehiclePose));
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    const PreintegratedOdometry odo = preintegrate(odometry, times[k - 1], times[k], config.odometry);
    Edge e;
    e.from = out.vehicle_nodes[k - 1];
    e.to = out.vehicle_nodes[k];
    e.measurement = odo.delta;
    e.information = odometry_information(odo, config.odometry);
    e.kind = EdgeKind::Odometry;
    g.add_edge(e);
  }

  std::size_t cursor = 0;
  for (const GnssReading& r : accepted) {
    while (cursor < times.size() && times[cursor] < r.t - kTimeMergeTolerance) ++cursor;
    const NodeId vehicle = out.vehicle_nodes[cursor];
    out.reading_vehicle_nodes.push_back(vehicle);
    const Pose2 fix(r.x, r.y, 0.0);
    const Eigen::Matrix3d info = gnss_information(r);

    switch (config.strategy) {
      case Strategy::G1: {
        g.add_edge(Edge{out.origin, vehicle, fix, info, EdgeKind::GnssAbsolute});
        break;
      }
      case Strategy::G2: {
        const NodeId gnss = g.add_node(fix, false, NodeKind::GnssPose);
        out.gnss_nodes.push_back(gnss);
        g.add_edge(Edge{out.origin, gnss, fix, info, EdgeKind::GnssAbsolute});
        const Eigen::Matrix3d tie =
            Eigen::Vector3d(config.identity_edge_strength, config.identity_edge_strength, 0.0).asDiagonal();
        g.add_edge(Edge{gnss, vehicle, Pose2::identity(), tie, EdgeKind::VirtualIdentity});
        break;
      }
      case Strategy::G3: {
        const NodeId gnss = g.add_node(fix, true, NodeKind::GnssPose);
        out.gnss_nodes.push_back(gnss);
        g.add_edge(Edge{gnss, vehicle, Pose2::identity(), info, EdgeKind::VirtualIdentity});
        break;
      }
    }
  }
  return out;
}

}  // namespace posefuse
