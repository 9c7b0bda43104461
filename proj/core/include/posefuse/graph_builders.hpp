#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "posefuse/gnss.hpp"
#include "posefuse/odometry.hpp"
#include "posefuse/pose_graph.hpp"

namespace posefuse {

/// How GNSS readings enter the graph.
///  - G1: absolute edges from the UTM origin to each vehicle node.
///  - G2: free GNSS nodes tied to the origin by absolute edges and to the
///        vehicle nodes by stiff identity edges.
///  - G3: fixed GNSS nodes tied to the vehicle nodes by identity edges that
///        carry the reading uncertainty.
enum class Strategy { G1, G2, G3 };
enum class NodeRate { PerGnssFix, PerOdometrySample };

std::string_view to_string(Strategy strategy);
/// Accepts "g1"/"G1" etc.; throws InvalidArgument otherwise.
Strategy parse_strategy(std::string_view text);

struct BuilderConfig {
  Strategy strategy = Strategy::G2;
  NodeRate node_rate = NodeRate::PerGnssFix;
  /// Position information of G2 identity edges.
  double identity_edge_strength = 1e6;
  OdometryModel odometry;

  void validate() const;
};

struct BuiltGraph {
  PoseGraph graph;
  NodeId origin;
  std::vector<NodeId> vehicle_nodes;
  std::vector<double> vehicle_times;
  /// Per accepted reading: vehicle node it constrains, in reading order.
  std::vector<NodeId> reading_vehicle_nodes;
  /// Per accepted reading: its GNSS node (G2/G3 only).
  std::vector<NodeId> gnss_nodes;
  /// Index into the caller's reading list for each accepted reading.
  std::vector<std::size_t> reading_indices;
};

/// Initial vehicle poses: the first pose sits on the first accepted fix with
/// the heading that aligns the odometry chord with the first GNSS chord of at
/// least 0.5 m; later poses chain pre-integrated odometry.
std::vector<Pose2> initialize_from_odometry(std::span<const GnssReading> readings,
                                            std::span<const OdometrySample> odometry,
                                            const OdometryModel& model = {});

/// Same, for an explicit timeline whose first entry is the first accepted fix.
std::vector<Pose2> initialize_from_odometry(std::span<const GnssReading> readings,
                                            std::span<const OdometrySample> odometry,
                                            std::span<const double> node_times, const OdometryModel& model);

/// Builds the pose graph using only readings whose `accepted` flag is set.
/// Throws TooFewReadings with fewer than two accepted readings and
/// InsufficientCoverage when odometry does not span them.
BuiltGraph build(std::span<const GnssReading> readings, std::span<const OdometrySample> odometry,
                 const BuilderConfig& config);

}  // namespace posefuse
