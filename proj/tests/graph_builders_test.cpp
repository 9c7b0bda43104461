#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/integration_oracle.hpp"
#include "posefuse/graph_builders.hpp"
#include "posefuse/solver.hpp"
#include "posefuse/synthetic.hpp"
#include "support.hpp"

using namespace posefuse;

namespace {

std::vector<OdometrySample> straight(double duration, double v) {
  std::vector<OdometrySample> s;
  for (int i = 0; i <= static_cast<int>(duration * 25); ++i) s.push_back({i / 25.0, 0.0, v});
  return s;
}

std::vector<GnssReading> three_fixes() {
  return {{0, 0, 0, 2, 2, 2, true}, {1, 10, 0, 2, 2, 2, true}, {2, 20, 0, 2, 2, 2, true}};
}

std::size_t count(const PoseGraph& g, EdgeKind k) {
  std::size_t n = 0;
  for (const Edge& e : g.edges()) n += e.kind == k;
  return n;
}

BuilderConfig with(Strategy s) {
  BuilderConfig c;
  c.strategy = s;
  return c;
}

}  // namespace

TEST(Build, StructuralCounts) {
  const auto odo = straight(3, 10);
  const auto r = three_fixes();
  const BuiltGraph g1 = build(r, odo, with(Strategy::G1));
  EXPECT_EQ(g1.graph.nodes().size(), 4u);
  EXPECT_EQ(g1.graph.edges().size(), 5u);
  EXPECT_EQ(count(g1.graph, EdgeKind::Odometry), 2u);
  EXPECT_EQ(count(g1.graph, EdgeKind::GnssAbsolute), 3u);

  const BuiltGraph g2 = build(r, odo, with(Strategy::G2));
  EXPECT_EQ(g2.graph.nodes().size(), 7u);
  EXPECT_EQ(g2.graph.edges().size(), 8u);
  EXPECT_EQ(count(g2.graph, EdgeKind::VirtualIdentity), 3u);
  EXPECT_EQ(g2.graph.fixed_count(), 1u);

  const BuiltGraph g3 = build(r, odo, with(Strategy::G3));
  EXPECT_EQ(g3.graph.nodes().size(), 7u);
  EXPECT_EQ(g3.graph.edges().size(), 5u);
  EXPECT_EQ(g3.graph.fixed_count(), 4u);
  EXPECT_EQ(count(g3.graph, EdgeKind::GnssAbsolute), 0u);
}

TEST(Build, RejectedReadingsAreOmitted) {
  const auto odo = straight(4, 10);
  auto r = three_fixes();
  r.push_back({3, 30, 0, 2, 2, 2, true});
  r[1].accepted = false;
  const BuiltGraph g = build(r, odo, with(Strategy::G1));
  EXPECT_EQ(g.vehicle_nodes.size(), 3u);
  EXPECT_EQ(count(g.graph, EdgeKind::GnssAbsolute), 3u);
  EXPECT_EQ(g.reading_indices, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(Build, Errors) {
  const auto odo = straight(3, 10);
  auto r = three_fixes();
  r[1].accepted = r[2].accepted = false;
  EXPECT_POSEFUSE_ERROR(build(r, odo, with(Strategy::G1)), ErrorCode::TooFewReadings);
  EXPECT_POSEFUSE_ERROR(build(three_fixes(), straight(1.5, 10), with(Strategy::G1)), ErrorCode::InsufficientCoverage);
  BuilderConfig bad;
  bad.identity_edge_strength = 0;
  EXPECT_POSEFUSE_ERROR(bad.validate(), ErrorCode::InvalidArgument);
  EXPECT_POSEFUSE_ERROR(parse_strategy("g4"), ErrorCode::InvalidArgument);
  EXPECT_EQ(parse_strategy("G3"), Strategy::G3);
}

TEST(Initialize, StraightSeeds) {
  const auto seeds = initialize_from_odometry(three_fixes(), straight(3, 10));
  ASSERT_EQ(seeds.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(seeds[k].x(), 10.0 * k, 1e-12);
    EXPECT_NEAR(seeds[k].y(), 0.0, 1e-12);
    EXPECT_NEAR(seeds[k].theta(), 0.0, 1e-12);
  }
}

TEST(Initialize, StandstillSeedsCoincide) {
  const std::vector<GnssReading> r{{0, 1, 2, 2, 2, 2, true}, {1, 1.2, 2.1, 2, 2, 2, true}, {2, 0.9, 1.8, 2, 2, 2, true}};
  const auto seeds = initialize_from_odometry(r, straight(3, 0));
  for (const Pose2& p : seeds) EXPECT_EQ(p, seeds.front());
  EXPECT_EQ(seeds.front().x(), 1.0);
  EXPECT_EQ(seeds.front().y(), 2.0);
}

TEST(Initialize, CurvedPathMatchesIntegrator) {
  const SyntheticDataset s = generate_synthetic(4, TrajectoryProfile::Highway, {}, {}, {.duration_s = 60});
  const auto& d = s.dataset;
  const auto seeds = initialize_from_odometry(d.gnss, d.odometry);
  std::vector<oracle::Sample> o;
  for (const auto& x : d.odometry) o.push_back({x.t, x.yaw_rate, x.velocity});
  const Pose2 p0 = seeds.front();
  for (std::size_t k = 1; k < seeds.size(); ++k) {
    const Eigen::Vector3d rel = oracle::dead_reckon(o, d.gnss[0].t, d.gnss[k].t, 400 * static_cast<int>(k));
    const double c = std::cos(p0.theta()), sn = std::sin(p0.theta());
    EXPECT_NEAR(seeds[k].x(), p0.x() + c * rel.x() - sn * rel.y(), 1e-3) << k;
    EXPECT_NEAR(seeds[k].y(), p0.y() + sn * rel.x() + c * rel.y(), 1e-3) << k;
  }
}

TEST(Build, OdometryResidualsStartAtZero) {
  GnssErrorModel e;
  e.ar1_rho = 0.9;
  e.ar1_sigma = 0.5;
  const SyntheticDataset s = generate_synthetic(5, TrajectoryProfile::UrbanLoop, e, {0.01}, {.duration_s = 120});
  for (Strategy st : {Strategy::G1, Strategy::G2, Strategy::G3}) {
    const BuiltGraph g = build(s.dataset.gnss, s.dataset.odometry, with(st));
    for (const Edge& edge : g.graph.edges()) {
      if (edge.kind != EdgeKind::Odometry) continue;
      EXPECT_LT(residual(g.graph, edge).vector().norm(), 1e-9);
    }
  }
}

TEST(Build, G3GnssNodesStayPut) {
  GnssErrorModel e;
  e.ar1_rho = 0.9;
  e.ar1_sigma = 0.5;
  const SyntheticDataset s = generate_synthetic(6, TrajectoryProfile::UrbanLoop, e, {0.01}, {.duration_s = 40});
  BuiltGraph g = build(s.dataset.gnss, s.dataset.odometry, with(Strategy::G3));
  std::vector<Pose2> before;
  for (NodeId id : g.gnss_nodes) before.push_back(g.graph.node(id).pose);
  optimize(g.graph);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(g.graph.node(g.gnss_nodes[i]).pose, before[i]);
}

TEST(Build, PerSampleNodeRate) {
  BuilderConfig c = with(Strategy::G1);
  c.node_rate = NodeRate::PerOdometrySample;
  const BuiltGraph g = build(three_fixes(), straight(3, 10), c);
  EXPECT_EQ(g.vehicle_nodes.size(), 51u);
  EXPECT_EQ(count(g.graph, EdgeKind::GnssAbsolute), 3u);
}
