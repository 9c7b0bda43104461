#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "posefuse/experiment.hpp"

namespace posefuse {

struct ExportOptions {
  bool dense_trajectory = true;
  bool graph_dump = false;
};

/// Files written by export_results; empty paths were not requested.
struct ExportedFiles {
  std::filesystem::path trajectory;  ///< trajectory.csv: t,x,y,theta,easting,northing
  std::filesystem::path dense;       ///< dense.csv, same columns
  std::filesystem::path metrics;     ///< metrics.txt: key = value lines, then a table
  std::filesystem::path scatter;     ///< scatter.csv: source,t,dx,dy
  std::filesystem::path graph;       ///< graph.txt
};

/// Writes the result files into `dir` (created if missing). Throws IoError
/// for an empty trajectory or when a file cannot be written; in both cases
/// nothing is left behind.
ExportedFiles export_results(const ExperimentResult& result, const std::filesystem::path& dir,
                             const ExportOptions& options = {});

/// Key/value metrics record of a single run followed by its table.
std::string render_metrics_record(const ExperimentResult& result);

/// Comparison report over a batch: for every configuration, per-dataset
/// key/value lines, the Average row and the improvement of the averaged fused
/// metrics over the averaged GNSS metrics, then fixed-width tables.
std::string render_batch_report(std::span<const ExperimentResult> results);

/// metrics.txt plus one export_results() directory per run, named
/// <dataset>/<strategy>-<rejection|no-rejection>.
void write_batch_report(std::span<const ExperimentResult> results, const std::filesystem::path& dir,
                        const ExportOptions& options = {});

/// Reads a trajectory.csv written by export_results (local-frame columns).
std::vector<TimedPose> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace posefuse
