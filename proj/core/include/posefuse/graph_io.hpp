#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "posefuse/pose_graph.hpp"

namespace posefuse {

// Plain-text pose-graph format, one record per line:
//
//   VERTEX_SE2 id x y theta [FIXED]
//   VERTEX_KIND id VEHICLE|UTM_ORIGIN|GNSS
//   EDGE_SE2 from to dx dy dtheta i11 i12 i13 i22 i23 i33 KIND
//
// KIND is ODOMETRY, GNSS_ABSOLUTE or VIRTUAL_IDENTITY. Floats carry 17
// significant digits so a dump reloads bit-exactly. VERTEX_KIND lines are
// optional on input (nodes default to VEHICLE); '#' starts a comment.

void write_graph(std::ostream& out, const PoseGraph& graph);
PoseGraph read_graph(std::istream& in);

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);

}  // namespace posefuse
