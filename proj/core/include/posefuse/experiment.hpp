#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posefuse/dataset.hpp"
#include "posefuse/gnss.hpp"
#include "posefuse/graph_builders.hpp"
#include "posefuse/metrics.hpp"
#include "posefuse/solver.hpp"

namespace posefuse {

struct ExperimentConfig {
  Strategy strategy = Strategy::G2;
  bool outlier_rejection = true;
  SolverConfig solver;
  /// builder.strategy is overridden by `strategy`.
  BuilderConfig builder;
  OutlierRejectionConfig rejection;
  PrecisionFormula precision_formula = PrecisionFormula::MeanOffset;
  std::uint64_t seed = 0;
  /// Also produce the pose at every odometry sample.
  bool dense_trajectory = true;
};

struct TimedPose {
  double t = 0.0;
  Pose2 pose;
};

struct ExperimentResult {
  std::string dataset_name;
  PlanarPoint frame_origin;
  std::string utm_zone;
  ExperimentConfig config;
  /// Fused pose at every GNSS timestamp covered by the graph, rejected
  /// readings included (local frame).
  std::vector<TimedPose> trajectory;
  std::vector<TimedPose> dense;
  std::vector<GnssReading> readings;  ///< with acceptance flags
  std::size_t rejected = 0;
  double rejection_rate_percent = 0.0;
  SolveReport solve;
  BuiltGraph graph;
  /// Present when the dataset carries truth.
  std::optional<MetricsReport> fused_metrics;
  std::optional<MetricsReport> gnss_metrics;
  std::vector<PpsPose> fused_pps;
  std::vector<PpsPose> gnss_pps;
};

/// Optional rejection, graph construction, optimization and, if truth is
/// available, scoring of both the fused trajectory and the raw GNSS readings
/// (all readings, rejected ones included). Non-convergence is reported in
/// `solve`, not thrown.
ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const TraceSink& trace = {});

/// Every dataset crossed with every config, in dataset-major order. Runs on up
/// to `threads` workers (0 picks the hardware concurrency); the result order
/// never depends on scheduling.
std::vector<ExperimentResult> run_batch(std::span<const Dataset> datasets, std::span<const ExperimentConfig> configs,
                                        unsigned threads = 0);

/// The six configurations of a comparison batch: G1..G3, rejection on and off.
std::vector<ExperimentConfig> comparison_configs(const ExperimentConfig& base = {});

/// Timed poses converted to points for metrics and matching.
std::vector<TimedPoint> to_points(std::span<const TimedPose> poses);

}  // namespace posefuse
