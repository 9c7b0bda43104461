#include "posefuse/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

#include <fmt/format.h>

#include "posefuse/error.hpp"
#include "posefuse/utm.hpp"

namespace posefuse {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Line-oriented CSV reader with a mandatory header.
class CsvTable {
 public:
  CsvTable(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      const std::string_view t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (header_.empty()) {
        const auto cols = split(t);
        for (std::size_t i = 0; i < cols.size(); ++i) header_[std::string(cols[i])] = i;
        columns_ = cols.size();
        continue;
      }
      const auto cols = split(t);
      if (cols.size() != columns_) {
        fail(line_no_, fmt::format("expected {} fields, found {}", columns_, cols.size()));
      }
      Row row{line_no_, {}};
      for (auto c : cols) row.fields.emplace_back(c);
      rows_.push_back(std::move(row));
    }
    if (header_.empty()) fail(line_no_, "missing header row");
  }

  struct Row {
    std::size_t line;
    std::vector<std::string> fields;
  };

  bool has(const std::string& column) const { return header_.count(column) > 0; }

  std::size_t column(const std::string& name) const {
    const auto it = header_.find(name);
    if (it == header_.end()) fail(1, fmt::format("missing column '{}'", name));
    return it->second;
  }

  const std::vector<Row>& rows() const { return rows_; }

  double number(const Row& row, std::size_t col) const {
    const std::string& f = row.fields[col];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value)) {
      fail(row.line, fmt::format("'{}' is not a finite number", f));
    }
    return value;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw Error(ErrorCode::ParseError, fmt::format("{} line {}: {}", source_, line, what));
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::size_t> header_;
  std::size_t columns_ = 0;
  std::size_t line_no_ = 0;
  std::vector<Row> rows_;
};

template <class Rows, class GetT>
void check_monotonic(const CsvTable& table, const Rows& rows, GetT get_t) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(get_t(i) > get_t(i - 1))) {
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  fmt::format("{} line {}: timestamp {} does not increase", table.source(), table.rows()[i].line,
                              get_t(i)));
    }
  }
}

std::string normalize_zone(std::string_view z) {
  std::string s(trim(z));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) {
    throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", p.string()));
  }
  return in;
}

}  // namespace

RawGnss parse_gnss_csv(std::istream& in, const std::string& source) {
  const CsvTable table(in, source);
  RawGnss out;
  const bool geodetic = table.has("lat") && table.has("lon");
  const std::size_t ct = table.column("t");
  const std::size_t cepx = table.column("epx");
  const std::size_t cepy = table.column("epy");
  const std::size_t cepv = table.column("epv");

  for (const auto& row : table.rows()) {
    GnssReading r;
    r.t = table.number(row, ct);
    r.epx = table.number(row, cepx);
    r.epy = table.number(row, cepy);
    r.epv = table.number(row, cepv);
    if (!(r.epx > 0.0) || !(r.epy > 0.0)) {
      table.fail(row.line, "epx and epy must be positive");
    }
    std::string zone;
    if (geodetic) {
      const double lat = table.number(row, table.column("lat"));
      const double lon = table.number(row, table.column("lon"));
      const UtmCoordinate utm = latlon_to_utm(lat, lon);
      r.x = utm.easting;
      r.y = utm.northing;
      zone = std::to_string(utm.zone_number) + (utm.north ? "N" : "S");
    } else {
      r.x = table.number(row, table.column("utm_x"));
      r.y = table.number(row, table.column("utm_y"));
      zone = normalize_zone(row.fields[table.column("zone")]);
    }
    if (out.readings.empty()) {
      out.zone = zone;
    } else if (zone != out.zone) {
      throw Error(ErrorCode::MixedUtmZones,
                  fmt::format("{} line {}: zone {} differs from {}", source, row.line, zone, out.zone));
    }
    out.readings.push_back(r);
  }
  check_monotonic(table, out.readings, [&](std::size_t i) { return out.readings[i].t; });
  return out;
}

std::vector<OdometrySample> parse_odometry_csv(std::istream& in, const std::string& source) {
  const CsvTable table(in, source);
  const std::size_t ct = table.column("t");
  const std::size_t cw = table.column("yaw_rate");
  const std::size_t cv = table.column("velocity");
  std::vector<OdometrySample> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    out.push_back({table.number(row, ct), table.number(row, cw), table.number(row, cv)});
  }
  check_monotonic(table, out, [&](std::size_t i) { return out[i].t; });
  return out;
}

std::vector<TruthFix> parse_truth_csv(std::istream& in, const std::string& source) {
  const CsvTable table(in, source);
  const std::size_t ct = table.column("t");
  const std::size_t cx = table.column("utm_x");
  const std::size_t cy = table.column("utm_y");
  std::vector<TruthFix> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    out.push_back({table.number(row, ct), table.number(row, cx), table.number(row, cy)});
  }
  check_monotonic(table, out, [&](std::size_t i) { return out[i].t; });
  return out;
}

Dataset load_dataset(const DatasetPaths& paths, const std::string& name) {
  Dataset d;
  d.name = name.empty() ? paths.gnss.parent_path().filename().string() : name;
  if (d.name.empty()) d.name = "dataset";

  auto gin = open(paths.gnss);
  RawGnss raw = parse_gnss_csv(gin, paths.gnss.string());
  if (raw.readings.empty()) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: no GNSS readings", paths.gnss.string()));
  }
  auto oin = open(paths.odometry);
  d.odometry = parse_odometry_csv(oin, paths.odometry.string());
  if (paths.truth) {
    auto tin = open(*paths.truth);
    d.truth = parse_truth_csv(tin, paths.truth->string());
  }

  d.utm_zone = raw.zone;
  d.frame_origin = {raw.readings.front().x, raw.readings.front().y};
  d.gnss = std::move(raw.readings);
  for (GnssReading& r : d.gnss) {
    r.x -= d.frame_origin.x;
    r.y -= d.frame_origin.y;
  }
  for (TruthFix& f : d.truth) {
    f.x -= d.frame_origin.x;
    f.y -= d.frame_origin.y;
  }
  return d;
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
  DatasetPaths paths{dir / "gnss.csv", dir / "odometry.csv", std::nullopt};
  if (std::filesystem::exists(dir / "truth.csv")) {
    paths.truth = dir / "truth.csv";
  }
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return load_dataset(paths, name);
}

void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  }
  auto write = [&](const std::string& file, const std::string& body) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out || !(out << body)) {
      throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", (dir / file).string()));
    }
  };

  std::string gnss = "t,utm_x,utm_y,zone,epx,epy,epv\n";
  for (const GnssReading& r : d.gnss) {
    gnss += fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", r.t, r.x + d.frame_origin.x,
                        r.y + d.frame_origin.y, d.utm_zone, r.epx, r.epy, r.epv);
  }
  std::string odo = "t,yaw_rate,velocity\n";
  for (const OdometrySample& s : d.odometry) {
    odo += fmt::format("{:.17g},{:.17g},{:.17g}\n", s.t, s.yaw_rate, s.velocity);
  }
  write("gnss.csv", gnss);
  write("odometry.csv", odo);
  if (!d.truth.empty()) {
    std::string truth = "t,utm_x,utm_y\n";
    for (const TruthFix& f : d.truth) {
      truth += fmt::format("{:.17g},{:.17g},{:.17g}\n", f.t, f.x + d.frame_origin.x, f.y + d.frame_origin.y);
    }
    write("truth.csv", truth);
  }
}

}  // namespace posefuse
