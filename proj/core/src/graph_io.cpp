#include "posefuse/graph_io.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

struct PendingVertex {
  Pose2 pose;
  bool fixed = false;
  NodeKind kind = NodeKind::VehiclePose;
};

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  if (s == "VEHICLE") return NodeKind::VehiclePose;
  if (s == "UTM_ORIGIN") return NodeKind::UtmOrigin;
  if (s == "GNSS") return NodeKind::GnssPose;
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view s) {
  if (s == "ODOMETRY") return EdgeKind::Odometry;
  if (s == "GNSS_ABSOLUTE") return EdgeKind::GnssAbsolute;
  if (s == "VIRTUAL_IDENTITY") return EdgeKind::VirtualIdentity;
  return std::nullopt;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, fmt::format("graph line {}: {}", line, what));
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::VehiclePose: return "VEHICLE";
    case NodeKind::UtmOrigin: return "UTM_ORIGIN";
    case NodeKind::GnssPose: return "GNSS";
  }
  return "VEHICLE";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Odometry: return "ODOMETRY";
    case EdgeKind::GnssAbsolute: return "GNSS_ABSOLUTE";
    case EdgeKind::VirtualIdentity: return "VIRTUAL_IDENTITY";
  }
  return "ODOMETRY";
}

void write_graph(std::ostream& out, const PoseGraph& graph) {
  for (const Node& n : graph.nodes()) {
    out << fmt::format("VERTEX_SE2 {} {:.17g} {:.17g} {:.17g}{}\n", n.id.index, n.pose.x(), n.pose.y(),
                       n.pose.theta(), n.fixed ? " FIXED" : "");
    out << fmt::format("VERTEX_KIND {} {}\n", n.id.index, to_string(n.kind));
  }
  for (const Edge& e : graph.edges()) {
    const Eigen::Matrix3d& i = e.information;
    out << fmt::format(
        "EDGE_SE2 {} {} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {}\n",
        e.from.index, e.to.index, e.measurement.x(), e.measurement.y(), e.measurement.theta(), i(0, 0),
        i(0, 1), i(0, 2), i(1, 1), i(1, 2), i(2, 2), to_string(e.kind));
  }
}

PoseGraph read_graph(std::istream& in) {
  std::vector<std::optional<PendingVertex>> vertices;
  std::vector<Edge> edges;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) {
      continue;
    }
    if (tag == "VERTEX_SE2") {
      std::size_t id = 0;
      double x = 0, y = 0, th = 0;
      if (!(ss >> id >> x >> y >> th)) parse_fail(line_no, "malformed VERTEX_SE2");
      std::string flag;
      bool fixed = false;
      if (ss >> flag) {
        if (flag != "FIXED") parse_fail(line_no, "unexpected token '" + flag + "'");
        fixed = true;
      }
      if (id >= vertices.size()) vertices.resize(id + 1);
      if (vertices[id]) parse_fail(line_no, "duplicate vertex " + std::to_string(id));
      vertices[id] = PendingVertex{Pose2(x, y, th), fixed, NodeKind::VehiclePose};
    } else if (tag == "VERTEX_KIND") {
      std::size_t id = 0;
      std::string kind;
      if (!(ss >> id >> kind)) parse_fail(line_no, "malformed VERTEX_KIND");
      const auto k = parse_node_kind(kind);
      if (!k) parse_fail(line_no, "unknown node kind '" + kind + "'");
      if (id >= vertices.size() || !vertices[id]) parse_fail(line_no, "VERTEX_KIND before VERTEX_SE2");
      vertices[id]->kind = *k;
    } else if (tag == "EDGE_SE2") {
      std::size_t from = 0, to = 0;
      double dx = 0, dy = 0, dth = 0;
      double i11 = 0, i12 = 0, i13 = 0, i22 = 0, i23 = 0, i33 = 0;
      std::string kind;
      if (!(ss >> from >> to >> dx >> dy >> dth >> i11 >> i12 >> i13 >> i22 >> i23 >> i33 >> kind)) {
        parse_fail(line_no, "malformed EDGE_SE2");
      }
      const auto k = parse_edge_kind(kind);
      if (!k) parse_fail(line_no, "unknown edge kind '" + kind + "'");
      Edge e;
      e.from = NodeId{from};
      e.to = NodeId{to};
      e.measurement = Pose2(dx, dy, dth);
      e.information << i11, i12, i13, i12, i22, i23, i13, i23, i33;
      e.kind = *k;
      edges.push_back(e);
    } else {
      parse_fail(line_no, "unknown record '" + tag + "'");
    }
  }

  PoseGraph graph;
  for (std::size_t id = 0; id < vertices.size(); ++id) {
    if (!vertices[id]) {
      throw Error(ErrorCode::ParseError, fmt::format("vertex ids are not contiguous: {} missing", id));
    }
    graph.add_node(vertices[id]->pose, vertices[id]->fixed, vertices[id]->kind);
  }
  for (const Edge& e : edges) {
    graph.add_edge(e);
  }
  return graph;
}

}  // namespace posefuse
