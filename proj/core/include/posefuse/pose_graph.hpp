#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "posefuse/se2.hpp"

namespace posefuse {

struct NodeId {
  std::size_t index = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind { VehiclePose, UtmOrigin, GnssPose };
enum class EdgeKind { Odometry, GnssAbsolute, VirtualIdentity };

struct Node {
  NodeId id;
  Pose2 pose;
  bool fixed = false;
  NodeKind kind = NodeKind::VehiclePose;
};

struct Edge {
  NodeId from;
  NodeId to;
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  EdgeKind kind = EdgeKind::Odometry;
};

/// Odometry edges use the full SE(2) log residual. GNSS-derived edges carry no
/// heading information and use position_residual(), whose translation error
/// does not depend on the heading of either endpoint.
bool uses_log_residual(EdgeKind kind);

class PoseGraph {
 public:
  NodeId add_node(const Pose2& pose, bool fixed, NodeKind kind);

  /// Validates endpoints and the information matrix; returns the edge ordinal.
  std::size_t add_edge(const Edge& edge);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(NodeId id) const;
  bool contains(NodeId id) const { return id.index < nodes_.size(); }

  /// Updates a free node. Fixed nodes cannot be moved.
  void set_pose(NodeId id, const Pose2& pose);

  std::size_t fixed_count() const;
  std::size_t free_count() const { return nodes_.size() - fixed_count(); }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

Tangent3 residual(const PoseGraph& graph, const Edge& edge);
EdgeJacobians jacobians(const PoseGraph& graph, const Edge& edge);

/// Chi-square contribution e^T Omega e of one edge.
double edge_error(const PoseGraph& graph, const Edge& edge);

/// Sum of e^T Omega e over all edges at the current node poses.
double total_error(const PoseGraph& graph);

}  // namespace posefuse
