#include "posefuse/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kTimeTolerance = 1e-9;

// Pose at time t: the optimized node at or before t, carried forward by odometry.
std::optional<Pose2> pose_at(const BuiltGraph& built, std::span<const OdometrySample> odometry, double t,
                             const OdometryModel& model) {
  const std::vector<double>& times = built.vehicle_times;
  if (times.empty() || t < times.front() - kTimeTolerance) return std::nullopt;
  auto it = std::upper_bound(times.begin(), times.end(), t + kTimeTolerance);
  const auto j = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
  const Pose2& base = built.graph.node(built.vehicle_nodes[j]).pose;
  if (std::abs(t - times[j]) <= kTimeTolerance) return base;
  try {
    return compose(base, preintegrate(odometry, times[j], t, model).delta);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientCoverage) return std::nullopt;
    throw;
  }
}

std::vector<TimedPoint> truth_points(std::span<const TruthFix> truth) {
  std::vector<TimedPoint> out;
  out.reserve(truth.size());
  for (const TruthFix& f : truth) out.push_back({f.t, {f.x, f.y}});
  return out;
}

void attach_improvements(MetricsReport& fused, const MetricsReport& gnss) {
  try {
    fused.improvement_vs_gnss = improvements(fused, gnss);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DivisionByZeroMetric) throw;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fused.improvement_vs_gnss = {nan, nan, nan};
  }
}

}  // namespace

std::vector<TimedPoint> to_points(std::span<const TimedPose> poses) {
  std::vector<TimedPoint> out;
  out.reserve(poses.size());
  for (const TimedPose& p : poses) out.push_back({p.t, {p.pose.x(), p.pose.y()}});
  return out;
}

ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& config, const TraceSink& trace) {
  if (dataset.gnss.empty()) throw Error(ErrorCode::EmptyInput, "dataset has no GNSS readings");
  ExperimentResult out;
  out.dataset_name = dataset.name;
  out.frame_origin = dataset.frame_origin;
  out.utm_zone = dataset.utm_zone;
  out.config = config;
  BuilderConfig builder = config.builder;
  builder.strategy = config.strategy;
  out.config.builder = builder;

  if (config.outlier_rejection) {
    RejectionResult rr = reject_outliers(dataset.gnss, dataset.odometry, config.rejection, builder.odometry);
    out.readings = std::move(rr.readings);
    out.rejected = rr.rejected;
    out.rejection_rate_percent = rr.rejection_rate_percent;
  } else {
    out.readings = dataset.gnss;
    for (GnssReading& r : out.readings) r.accepted = true;
  }

  out.graph = build(out.readings, dataset.odometry, builder);
  out.solve = optimize(out.graph.graph, config.solver, trace);

  for (const GnssReading& r : out.readings) {
    if (auto p = pose_at(out.graph, dataset.odometry, r.t, builder.odometry)) out.trajectory.push_back({r.t, *p});
  }
  if (config.dense_trajectory) {
    const double t0 = out.graph.vehicle_times.front();
    const double t1 = out.graph.vehicle_times.back();
    for (const OdometrySample& s : dataset.odometry) {
      if (s.t < t0 - kTimeTolerance || s.t > t1 + kTimeTolerance) continue;
      if (auto p = pose_at(out.graph, dataset.odometry, s.t, builder.odometry)) out.dense.push_back({s.t, *p});
    }
  }

  if (!dataset.truth.empty()) {
    const std::vector<TimedPoint> truth = truth_points(dataset.truth);
    out.fused_pps = match_pps(to_points(out.trajectory), truth).poses;
    std::vector<TimedPoint> raw;
    raw.reserve(dataset.gnss.size());
    for (const GnssReading& r : dataset.gnss) raw.push_back({r.t, {r.x, r.y}});
    out.gnss_pps = match_pps(raw, truth).poses;

    MetricsReport fused = evaluate(out.fused_pps, config.precision_formula);
    MetricsReport gnss = evaluate(out.gnss_pps, config.precision_formula);
    fused.rejection_rate = out.rejection_rate_percent;
    attach_improvements(fused, gnss);
    out.fused_metrics = fused;
    out.gnss_metrics = gnss;
  }
  return out;
}

std::vector<ExperimentConfig> comparison_configs(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> out;
  for (Strategy s : {Strategy::G1, Strategy::G2, Strategy::G3}) {
    for (bool rejection : {false, true}) {
      ExperimentConfig c = base;
      c.strategy = s;
      c.outlier_rejection = rejection;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<ExperimentResult> run_batch(std::span<const Dataset> datasets, std::span<const ExperimentConfig> configs,
                                        unsigned threads) {
  const std::size_t total = datasets.size() * configs.size();
  std::vector<ExperimentResult> results(total);
  if (total == 0) return results;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, total);

  auto job = [&](std::size_t i) {
    return run_experiment(datasets[i / configs.size()], configs[i % configs.size()]);
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) results[i] = job(i);
    return results;
  }
  // Static striding: worker w handles w, w + workers, ...; each slot is
  // written by exactly one worker.
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < total; i += workers) results[i] = job(i);
    }));
  }
  for (auto& f : futures) f.get();
  return results;
}

}  // namespace posefuse
