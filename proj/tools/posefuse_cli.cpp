// posefuse command line: run, batch, synth, graph-dump.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "posefuse/dataset.hpp"
#include "posefuse/error.hpp"
#include "posefuse/experiment.hpp"
#include "posefuse/graph_io.hpp"
#include "posefuse/report.hpp"
#include "posefuse/synthetic.hpp"

namespace fs = std::filesystem;
using namespace posefuse;

namespace {

struct InputOptions {
  std::string dir;
  std::string gnss;
  std::string odometry;
  std::string truth;
};

struct ExperimentOptions {
  std::string strategy = "g2";
  bool no_rejection = false;
  bool metrics_literal = false;
  bool trace = false;
  std::string method = "dogleg";
  int max_iterations = 100;
  bool per_sample_nodes = false;
};

struct SynthOptions {
  std::string profile = "urban";
  double duration = 600.0;
  std::vector<double> bias{0.5, 0.5};
  double rho = 0.95;
  double precision = 1.625;
  double outlier_rate = 0.05;
  double outlier_magnitude = 50.0;
  double drift = 0.011;
  std::vector<double> standstill;
};

void add_input(CLI::App* app, InputOptions& in) {
  app->add_option("--dataset", in.dir, "Directory with gnss.csv, odometry.csv and optional truth.csv");
  app->add_option("--gnss", in.gnss, "GNSS CSV");
  app->add_option("--odometry", in.odometry, "Odometry CSV");
  app->add_option("--truth", in.truth, "RTK truth CSV");
}

void add_experiment(CLI::App* app, ExperimentOptions& ex, bool with_strategy) {
  if (with_strategy) {
    app->add_option("--strategy", ex.strategy, "Graph strategy")
        ->check(CLI::IsMember({"g1", "g2", "g3"}, CLI::ignore_case));
    app->add_flag("--no-outlier-rejection", ex.no_rejection, "Use every GNSS reading");
  }
  app->add_flag("--metrics-literal", ex.metrics_literal, "Precision with the formula exactly as typeset");
  app->add_flag("--trace", ex.trace, "Print solver iterations to stderr");
  app->add_option("--method", ex.method, "Solver")->check(CLI::IsMember({"dogleg", "lm", "gn"}));
  app->add_option("--max-iterations", ex.max_iterations, "Solver iteration limit")->check(CLI::PositiveNumber);
  app->add_flag("--per-sample-nodes", ex.per_sample_nodes, "One vehicle node per odometry sample");
}

void add_synth(CLI::App* app, SynthOptions& s) {
  app->add_option("--profile", s.profile, "straight, urban or highway");
  app->add_option("--duration", s.duration, "Seconds of driving (one fix per second)");
  app->add_option("--bias", s.bias, "Constant GNSS bias x,y (m)")->delimiter(',')->expected(2);
  app->add_option("--rho", s.rho, "AR(1) coefficient of the GNSS noise");
  app->add_option("--precision", s.precision, "Target two-axis GNSS dispersion (m)");
  app->add_option("--outlier-rate", s.outlier_rate, "Fraction of readings with a jump");
  app->add_option("--outlier-magnitude", s.outlier_magnitude, "Jump length (m)");
  app->add_option("--drift", s.drift, "Odometry scale noise fraction");
  app->add_option("--standstill", s.standstill, "Stop start,duration (s)")->delimiter(',')->expected(2);
}

Dataset load_input(const InputOptions& in) {
  if (!in.dir.empty()) return load_dataset_dir(in.dir);
  if (in.gnss.empty() || in.odometry.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give --dataset DIR or both --gnss and --odometry");
  }
  DatasetPaths paths{in.gnss, in.odometry, std::nullopt};
  if (!in.truth.empty()) paths.truth = fs::path(in.truth);
  return load_dataset(paths, fs::path(in.gnss).parent_path().filename().string());
}

ExperimentConfig make_config(const ExperimentOptions& ex, std::uint64_t seed) {
  ExperimentConfig c;
  c.strategy = parse_strategy(ex.strategy);
  c.outlier_rejection = !ex.no_rejection;
  c.precision_formula = ex.metrics_literal ? PrecisionFormula::AsPrinted : PrecisionFormula::MeanOffset;
  c.seed = seed;
  c.solver.max_iterations = ex.max_iterations;
  if (ex.method == "lm") c.solver.method = SolverMethod::LevenbergMarquardt;
  if (ex.method == "gn") c.solver.method = SolverMethod::GaussNewton;
  c.builder.node_rate = ex.per_sample_nodes ? NodeRate::PerOdometrySample : NodeRate::PerGnssFix;
  return c;
}

SyntheticDataset make_synthetic(const SynthOptions& s, std::uint64_t seed) {
  GnssErrorModel g;
  g.bias = {s.bias.at(0), s.bias.at(1)};
  g.ar1_rho = s.rho;
  g.ar1_sigma = ar1_sigma_for_precision(s.precision, s.rho);
  g.outlier_rate = s.outlier_rate;
  g.outlier_magnitude = s.outlier_magnitude;
  SyntheticOptions opt;
  opt.duration_s = s.duration;
  if (s.standstill.size() == 2) opt.standstill = Standstill{s.standstill[0], s.standstill[1]};
  return generate_synthetic(seed, parse_profile(s.profile), g, OdometryErrorModel{s.drift}, opt);
}

void print_summary(const ExperimentResult& r) {
  fmt::print("{} {} {}: {} after {} iterations, chi2 {:.6g} -> {:.6g}, rejected {}/{}\n", r.dataset_name,
             to_string(r.config.strategy), r.config.outlier_rejection ? "rejection" : "no-rejection",
             to_string(r.solve.termination), r.solve.iterations, r.solve.initial_error, r.solve.final_error,
             r.rejected, r.readings.size());
  if (r.fused_metrics && r.gnss_metrics) {
    fmt::print("  gnss  max {:.3f} acc {:.3f} prec {:.3f}\n", r.gnss_metrics->max_offset, r.gnss_metrics->accuracy,
               r.gnss_metrics->precision);
    fmt::print("  fused max {:.3f} acc {:.3f} prec {:.3f}\n", r.fused_metrics->max_offset,
               r.fused_metrics->accuracy, r.fused_metrics->precision);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNSS and odometry fusion by pose graph optimization"};
  app.require_subcommand(1);

  InputOptions run_in;
  ExperimentOptions run_ex;
  std::string run_out;
  bool run_graph = false;
  auto* run = app.add_subcommand("run", "Fuse one dataset with one strategy");
  add_input(run, run_in);
  add_experiment(run, run_ex, true);
  run->add_option("--out", run_out, "Output directory");
  run->add_flag("--graph-dump", run_graph, "Also write the optimized graph");

  std::vector<std::string> batch_dirs;
  ExperimentOptions batch_ex;
  SynthOptions batch_synth;
  int batch_synthetic = 0;
  std::uint64_t batch_seed = 1;
  unsigned batch_threads = 0;
  std::string batch_out;
  auto* batch = app.add_subcommand("batch", "All strategies with and without outlier rejection");
  batch->add_option("--dataset", batch_dirs, "Dataset directories");
  batch->add_option("--synthetic", batch_synthetic, "Generate this many synthetic datasets instead");
  batch->add_option("--seed", batch_seed, "Seed of the first synthetic dataset");
  batch->add_option("--threads", batch_threads, "Worker threads (0: all cores)");
  batch->add_option("--out", batch_out, "Output directory")->required();
  add_experiment(batch, batch_ex, false);
  add_synth(batch, batch_synth);

  SynthOptions synth_opt;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  add_synth(synth, synth_opt);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", synth_out, "Output directory")->required();

  InputOptions dump_in;
  ExperimentOptions dump_ex;
  bool dump_optimized = false;
  std::string dump_out;
  auto* dump = app.add_subcommand("graph-dump", "Write the pose graph of a dataset");
  add_input(dump, dump_in);
  add_experiment(dump, dump_ex, true);
  dump->add_flag("--optimized", dump_optimized, "Dump after optimization");
  dump->add_option("--out", dump_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Dataset data = load_input(run_in);
      ExperimentConfig config = make_config(run_ex, 0);
      TraceSink trace;
      if (run_ex.trace) trace = [](const IterationRecord& r) { std::cerr << format_trace_line(r) << '\n'; };
      const ExperimentResult r = run_experiment(data, config, trace);
      print_summary(r);
      if (!run_out.empty()) {
        ExportOptions opt;
        opt.graph_dump = run_graph;
        export_results(r, run_out, opt);
      }
    } else if (*batch) {
      std::vector<Dataset> datasets;
      for (const std::string& d : batch_dirs) datasets.push_back(load_dataset_dir(d));
      for (int i = 0; i < batch_synthetic; ++i) {
        datasets.push_back(make_synthetic(batch_synth, batch_seed + static_cast<std::uint64_t>(i)).dataset);
      }
      if (datasets.empty()) throw Error(ErrorCode::InvalidArgument, "batch needs --dataset or --synthetic");
      const std::vector<ExperimentConfig> configs = comparison_configs(make_config(batch_ex, batch_seed));
      const std::vector<ExperimentResult> results = run_batch(datasets, configs, batch_threads);
      write_batch_report(results, batch_out);
      for (const ExperimentResult& r : results) print_summary(r);
    } else if (*synth) {
      save_dataset(make_synthetic(synth_opt, synth_seed).dataset, synth_out);
    } else if (*dump) {
      const Dataset data = load_input(dump_in);
      ExperimentConfig config = make_config(dump_ex, 0);
      PoseGraph graph;
      if (dump_optimized) {
        graph = run_experiment(data, config).graph.graph;
      } else {
        std::vector<GnssReading> readings = data.gnss;
        if (config.outlier_rejection) readings = reject_outliers(readings, data.odometry, config.rejection).readings;
        BuilderConfig b = config.builder;
        b.strategy = config.strategy;
        graph = build(readings, data.odometry, b).graph;
      }
      if (dump_out.empty()) {
        write_graph(std::cout, graph);
      } else {
        std::ofstream out(dump_out);
        if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", dump_out));
        write_graph(out, graph);
      }
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
