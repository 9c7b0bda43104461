#include <benchmark/benchmark.h>

#include "posefuse/experiment.hpp"
#include "posefuse/graph_builders.hpp"
#include "posefuse/solver.hpp"
#include "posefuse/synthetic.hpp"

namespace {

using namespace posefuse;

SyntheticDataset dataset_of(double duration) {
  GnssErrorModel g;
  g.bias = {0.5, 0.5};
  g.ar1_rho = 0.95;
  g.ar1_sigma = ar1_sigma_for_precision(1.625, 0.95);
  SyntheticOptions opt;
  opt.duration_s = duration;
  return generate_synthetic(3, TrajectoryProfile::UrbanLoop, g, OdometryErrorModel{0.011}, opt);
}

void BM_Preintegrate(benchmark::State& state) {
  const SyntheticDataset s = dataset_of(120.0);
  const double span = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(preintegrate(s.dataset.odometry, 10.0, 10.0 + span));
  }
}
BENCHMARK(BM_Preintegrate)->Arg(1)->Arg(10)->Arg(100);

void BM_BuildLinearSystem(benchmark::State& state) {
  const SyntheticDataset s = dataset_of(static_cast<double>(state.range(0)));
  BuilderConfig b;
  const BuiltGraph built = build(s.dataset.gnss, s.dataset.odometry, b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_linear_system(built.graph));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildLinearSystem)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Optimize(benchmark::State& state) {
  const SyntheticDataset s = dataset_of(static_cast<double>(state.range(0)));
  BuilderConfig b;
  b.strategy = static_cast<Strategy>(state.range(1));
  const BuiltGraph built = build(s.dataset.gnss, s.dataset.odometry, b);
  for (auto _ : state) {
    PoseGraph g = built.graph;
    benchmark::DoNotOptimize(optimize(g));
  }
}
BENCHMARK(BM_Optimize)->ArgsProduct({{100, 600, 3600}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
  const SyntheticDataset s = dataset_of(600.0);
  ExperimentConfig c;
  c.dense_trajectory = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(s.dataset, c));
  }
}
BENCHMARK(BM_RunExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
