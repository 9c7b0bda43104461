#include "posefuse/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kSymmetryTolerance = 1e-9;

void validate_information(const Eigen::Matrix3d& info) {
  if (!info.allFinite()) {
    throw Error(ErrorCode::BadInformation, "information matrix has non-finite entries");
  }
  for (int i = 0; i < 3; ++i) {
    if (info(i, i) < 0.0) {
      throw Error(ErrorCode::BadInformation,
                  "information matrix has negative diagonal entry at " + std::to_string(i));
    }
  }
  if ((info - info.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw Error(ErrorCode::BadInformation, "information matrix is not symmetric");
  }
}

}  // namespace

bool uses_log_residual(EdgeKind kind) { return kind == EdgeKind::Odometry; }

NodeId PoseGraph::add_node(const Pose2& pose, bool fixed, NodeKind kind) {
  if (kind == NodeKind::UtmOrigin && !fixed) {
    throw Error(ErrorCode::InvalidArgument, "UTM origin node must be fixed");
  }
  const NodeId id{nodes_.size()};
  nodes_.push_back(Node{id, pose, fixed, kind});
  return id;
}

std::size_t PoseGraph::add_edge(const Edge& edge) {
  if (!contains(edge.from) || !contains(edge.to)) {
    throw Error(ErrorCode::UnknownNode, "edge " + std::to_string(edge.from.index) + " -> " +
                                            std::to_string(edge.to.index) + " references a missing node");
  }
  if (edge.from == edge.to) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoints must differ");
  }
  validate_information(edge.information);
  if (edge.kind == EdgeKind::VirtualIdentity && !(edge.measurement == Pose2::identity())) {
    throw Error(ErrorCode::InvalidArgument, "virtual identity edge must carry the identity measurement");
  }
  edges_.push_back(edge);
  return edges_.size() - 1;
}

const Node& PoseGraph::node(NodeId id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id.index));
  }
  return nodes_[id.index];
}

void PoseGraph::set_pose(NodeId id, const Pose2& pose) {
  if (!contains(id)) {
    throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id.index));
  }
  Node& n = nodes_[id.index];
  if (n.fixed) {
    throw Error(ErrorCode::InvalidArgument, "cannot move fixed node " + std::to_string(id.index));
  }
  n.pose = pose;
}

std::size_t PoseGraph::fixed_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.fixed; }));
}

Tangent3 residual(const PoseGraph& graph, const Edge& edge) {
  const Pose2& xi = graph.node(edge.from).pose;
  const Pose2& xj = graph.node(edge.to).pose;
  return uses_log_residual(edge.kind) ? edge_residual(xi, xj, edge.measurement)
                                      : position_residual(xi, xj, edge.measurement);
}

EdgeJacobians jacobians(const PoseGraph& graph, const Edge& edge) {
  const Pose2& xi = graph.node(edge.from).pose;
  const Pose2& xj = graph.node(edge.to).pose;
  return uses_log_residual(edge.kind) ? edge_jacobians(xi, xj, edge.measurement)
                                      : position_jacobians(xi, xj, edge.measurement);
}

double edge_error(const PoseGraph& graph, const Edge& edge) {
  const Eigen::Vector3d e = residual(graph, edge).vector();
  return e.dot(edge.information * e);
}

double total_error(const PoseGraph& graph) {
  double sum = 0.0;
  for (const Edge& edge : graph.edges()) {
    sum += edge_error(graph, edge);
  }
  return sum;
}

}  // namespace posefuse
