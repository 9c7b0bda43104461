#include "posefuse/report.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "posefuse/error.hpp"
#include "posefuse/graph_io.hpp"

namespace posefuse {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string rejection_label(bool on) { return on ? "rejection" : "no-rejection"; }

std::string config_label(const ExperimentConfig& c) {
  return fmt::format("{} {}", to_string(c.strategy), rejection_label(c.outlier_rejection));
}

std::string safe_name(const std::string& name) {
  std::string out = name.empty() ? "dataset" : name;
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                    ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  return out;
}

std::string trajectory_csv(const std::vector<TimedPose>& poses, const ExperimentResult& r) {
  std::string out = fmt::format("# frame origin {} {} zone {}\n", g17(r.frame_origin.x), g17(r.frame_origin.y),
                                r.utm_zone.empty() ? "-" : r.utm_zone);
  out += "t,x,y,theta,easting,northing\n";
  for (const TimedPose& p : poses) {
    out += fmt::format("{},{},{},{},{},{}\n", g17(p.t), g17(p.pose.x()), g17(p.pose.y()), g17(p.pose.theta()),
                       g17(r.frame_origin.x + p.pose.x()), g17(r.frame_origin.y + p.pose.y()));
  }
  return out;
}

std::string scatter_csv(const ExperimentResult& r) {
  std::string out = "source,t,dx,dy\n";
  auto emit = [&](const char* source, const std::vector<PpsPose>& poses) {
    for (const PpsPose& p : poses) {
      out += fmt::format("{},{},{},{}\n", source, g17(p.t), g17(p.estimate.x - p.truth.x),
                         g17(p.estimate.y - p.truth.y));
    }
  };
  emit("gnss", r.gnss_pps);
  emit("fused", r.fused_pps);
  return out;
}

void append_metrics(std::string& out, const std::string& prefix, const MetricsReport& m) {
  out += fmt::format("{}.n = {}\n", prefix, m.n);
  out += fmt::format("{}.max = {}\n", prefix, g17(m.max_offset));
  out += fmt::format("{}.acc = {}\n", prefix, g17(m.accuracy));
  out += fmt::format("{}.prec = {}\n", prefix, g17(m.precision));
  out += fmt::format("{}.mean_offset_x = {}\n", prefix, g17(m.mean_offset.x));
  out += fmt::format("{}.mean_offset_y = {}\n", prefix, g17(m.mean_offset.y));
}

void append_improvement(std::string& out, const std::string& prefix, const Improvements& imp) {
  out += fmt::format("{}.max_percent = {}\n", prefix, g17(imp.max_percent));
  out += fmt::format("{}.acc_percent = {}\n", prefix, g17(imp.acc_percent));
  out += fmt::format("{}.prec_percent = {}\n", prefix, g17(imp.prec_percent));
}

struct Row {
  std::string label;
  double gnss[3];
  double fused[3];
  double rejection;
};

std::string render_table(const std::string& title, const std::vector<Row>& rows, const Improvements* improvement) {
  std::string out = fmt::format("{}\n", title);
  const std::string header = fmt::format("{:<28}|{:>10}{:>10}{:>10} |{:>10}{:>10}{:>10} |{:>9}\n", "Dataset",
                                         "GNSS Max", "Acc", "Prec", "Fused Max", "Acc", "Prec", "Rej (%)");
  out += header;
  out += std::string(header.size() - 1, '-') + "\n";
  for (const Row& r : rows) {
    out += fmt::format("{:<28}|{:>10.3f}{:>10.3f}{:>10.3f} |{:>10.3f}{:>10.3f}{:>10.3f} |{:>9.3f}\n", r.label,
                       r.gnss[0], r.gnss[1], r.gnss[2], r.fused[0], r.fused[1], r.fused[2], r.rejection);
  }
  if (improvement) {
    out += fmt::format("{:<28}|{:>30} |{:>10.3f}{:>10.3f}{:>10.3f} |\n", "Improvement w.r.t. GNSS (%)", "",
                       improvement->max_percent, improvement->acc_percent, improvement->prec_percent);
  }
  return out;
}

Row row_of(const std::string& label, const MetricsReport& g, const MetricsReport& f) {
  return Row{label, {g.max_offset, g.accuracy, g.precision}, {f.max_offset, f.accuracy, f.precision},
             f.rejection_rate};
}

void append_solve(std::string& out, const std::string& prefix, const SolveReport& s) {
  out += fmt::format("{}.converged = {}\n", prefix, s.converged ? "true" : "false");
  out += fmt::format("{}.termination = {}\n", prefix, to_string(s.termination));
  out += fmt::format("{}.iterations = {}\n", prefix, s.iterations);
  out += fmt::format("{}.initial_chi2 = {}\n", prefix, g17(s.initial_error));
  out += fmt::format("{}.final_chi2 = {}\n", prefix, g17(s.final_error));
}

// Writes all files or none.
void write_all(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> written;
  auto rollback = [&] {
    std::error_code ec;
    for (const fs::path& p : written) fs::remove(p, ec);
  };
  for (const auto& [path, content] : files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (out) out.close();
    if (!out) {
      written.push_back(path);
      rollback();
      throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    }
    written.push_back(path);
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, fmt::format("cannot create directory '{}'", dir.string()));
  }
}

}  // namespace

std::string render_metrics_record(const ExperimentResult& r) {
  std::string out;
  out += fmt::format("dataset = {}\n", r.dataset_name);
  out += fmt::format("strategy = {}\n", to_string(r.config.strategy));
  out += fmt::format("outlier_rejection = {}\n", r.config.outlier_rejection ? "on" : "off");
  out += fmt::format("precision_formula = {}\n", to_string(r.config.precision_formula));
  out += fmt::format("seed = {}\n", r.config.seed);
  append_solve(out, "solve", r.solve);
  out += fmt::format("readings = {}\n", r.readings.size());
  out += fmt::format("rejected = {}\n", r.rejected);
  out += fmt::format("rejection_rate_percent = {}\n", g17(r.rejection_rate_percent));
  if (r.fused_metrics && r.gnss_metrics) {
    append_metrics(out, "gnss", *r.gnss_metrics);
    append_metrics(out, "fused", *r.fused_metrics);
    append_improvement(out, "improvement", r.fused_metrics->improvement_vs_gnss);
    out += "\n";
    const std::vector<Row> rows{row_of(r.dataset_name, *r.gnss_metrics, *r.fused_metrics)};
    out += render_table(config_label(r.config), rows, &r.fused_metrics->improvement_vs_gnss);
  }
  return out;
}

std::string render_batch_report(std::span<const ExperimentResult> results) {
  // Group by configuration in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ExperimentResult*>> groups;
  for (const ExperimentResult& r : results) {
    const std::string key = config_label(r.config);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }

  std::string record;
  std::string tables;
  for (const std::string& key : order) {
    const auto& members = groups[key];
    const std::string section = fmt::format("{}.{}", to_string(members.front()->config.strategy),
                                            rejection_label(members.front()->config.outlier_rejection));
    record += fmt::format("[{}]\n", key);
    std::vector<Row> rows;
    MetricsReport avg_gnss;
    MetricsReport avg_fused;
    std::size_t scored = 0;
    for (const ExperimentResult* r : members) {
      const std::string prefix = fmt::format("{}.{}", section, r->dataset_name);
      append_solve(record, prefix + ".solve", r->solve);
      record += fmt::format("{}.rejection_rate_percent = {}\n", prefix, g17(r->rejection_rate_percent));
      if (!r->fused_metrics || !r->gnss_metrics) continue;
      append_metrics(record, prefix + ".gnss", *r->gnss_metrics);
      append_metrics(record, prefix + ".fused", *r->fused_metrics);
      rows.push_back(row_of(r->dataset_name, *r->gnss_metrics, *r->fused_metrics));
      avg_gnss.max_offset += r->gnss_metrics->max_offset;
      avg_gnss.accuracy += r->gnss_metrics->accuracy;
      avg_gnss.precision += r->gnss_metrics->precision;
      avg_fused.max_offset += r->fused_metrics->max_offset;
      avg_fused.accuracy += r->fused_metrics->accuracy;
      avg_fused.precision += r->fused_metrics->precision;
      avg_fused.rejection_rate += r->fused_metrics->rejection_rate;
      ++scored;
    }
    if (scored > 0) {
      const double n = static_cast<double>(scored);
      for (MetricsReport* m : {&avg_gnss, &avg_fused}) {
        m->max_offset /= n;
        m->accuracy /= n;
        m->precision /= n;
        m->rejection_rate /= n;
      }
      record += fmt::format("{}.average.gnss.max = {}\n", section, g17(avg_gnss.max_offset));
      record += fmt::format("{}.average.gnss.acc = {}\n", section, g17(avg_gnss.accuracy));
      record += fmt::format("{}.average.gnss.prec = {}\n", section, g17(avg_gnss.precision));
      record += fmt::format("{}.average.fused.max = {}\n", section, g17(avg_fused.max_offset));
      record += fmt::format("{}.average.fused.acc = {}\n", section, g17(avg_fused.accuracy));
      record += fmt::format("{}.average.fused.prec = {}\n", section, g17(avg_fused.precision));
      record += fmt::format("{}.average.rejection_rate_percent = {}\n", section, g17(avg_fused.rejection_rate));
      Improvements imp;
      try {
        imp = improvements(avg_fused, avg_gnss);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DivisionByZeroMetric) throw;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        imp = {nan, nan, nan};
      }
      append_improvement(record, section + ".improvement", imp);
      rows.push_back(row_of("Average", avg_gnss, avg_fused));
      tables += render_table(key, rows, &imp) + "\n";
    }
    record += "\n";
  }
  return record + tables;
}

ExportedFiles export_results(const ExperimentResult& result, const fs::path& dir, const ExportOptions& options) {
  if (result.trajectory.empty()) {
    throw Error(ErrorCode::IoError, "refusing to export an empty trajectory");
  }
  ExportedFiles files;
  std::vector<std::pair<fs::path, std::string>> contents;
  files.trajectory = dir / "trajectory.csv";
  contents.emplace_back(files.trajectory, trajectory_csv(result.trajectory, result));
  if (options.dense_trajectory && !result.dense.empty()) {
    files.dense = dir / "dense.csv";
    contents.emplace_back(files.dense, trajectory_csv(result.dense, result));
  }
  files.metrics = dir / "metrics.txt";
  contents.emplace_back(files.metrics, render_metrics_record(result));
  files.scatter = dir / "scatter.csv";
  contents.emplace_back(files.scatter, scatter_csv(result));
  if (options.graph_dump) {
    files.graph = dir / "graph.txt";
    std::ostringstream os;
    write_graph(os, result.graph.graph);
    contents.emplace_back(files.graph, os.str());
  }
  ensure_dir(dir);
  write_all(contents);
  return files;
}

void write_batch_report(std::span<const ExperimentResult> results, const fs::path& dir, const ExportOptions& options) {
  ensure_dir(dir);
  for (const ExperimentResult& r : results) {
    const fs::path sub = dir / safe_name(r.dataset_name) /
                         fmt::format("{}-{}", to_string(r.config.strategy), rejection_label(r.config.outlier_rejection));
    export_results(r, sub, options);
  }
  write_all({{dir / "metrics.txt", render_batch_report(results)}});
}

std::vector<TimedPose> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
  std::vector<TimedPose> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line.rfind("t,x,y,theta", 0) != 0) {
        throw Error(ErrorCode::ParseError, fmt::format("{} line {}: unexpected header", path.string(), line_no));
      }
      header = true;
      continue;
    }
    double v[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      auto [next, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc{} || (next != end && *next != ',')) {
        throw Error(ErrorCode::ParseError, fmt::format("{} line {}: bad number", path.string(), line_no));
      }
      p = next == end ? end : next + 1;
      if (k < 3 && next == end) {
        throw Error(ErrorCode::ParseError, fmt::format("{} line {}: missing column", path.string(), line_no));
      }
    }
    out.push_back({v[0], Pose2(v[1], v[2], v[3])});
  }
  if (!header) throw Error(ErrorCode::ParseError, fmt::format("{}: missing header", path.string()));
  return out;
}

}  // namespace posefuse
