#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "posefuse/gnss.hpp"
#include "posefuse/metrics.hpp"
#include "posefuse/odometry.hpp"

namespace posefuse {

/// RTK reference position.
struct TruthFix {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// All streams of one drive, expressed in a local frame whose origin is the
/// first GNSS fix (frame_origin holds its absolute UTM coordinates).
struct Dataset {
  std::string name;
  std::vector<GnssReading> gnss;
  std::vector<OdometrySample> odometry;
  std::vector<TruthFix> truth;
  PlanarPoint frame_origin;
  std::string utm_zone;
};

struct DatasetPaths {
  std::filesystem::path gnss;
  std::filesystem::path odometry;
  std::optional<std::filesystem::path> truth;
};

// CSV schemas (header row mandatory, column order free, '#' comments):
//   GNSS      t,lat,lon,epx,epy,epv   or   t,utm_x,utm_y,zone,epx,epy,epv
//   odometry  t,yaw_rate,velocity
//   truth     t,utm_x,utm_y
// Parsers return absolute coordinates; lat/lon input is projected to UTM.

struct RawGnss {
  std::vector<GnssReading> readings;  ///< absolute UTM coordinates
  std::string zone;
};

RawGnss parse_gnss_csv(std::istream& in, const std::string& source = "gnss");
std::vector<OdometrySample> parse_odometry_csv(std::istream& in, const std::string& source = "odometry");
std::vector<TruthFix> parse_truth_csv(std::istream& in, const std::string& source = "truth");

/// Parses, validates ordering, and shifts every absolute coordinate into the
/// local frame of the first GNSS fix. Throws ParseError (with line number),
/// NonMonotonicTimestamps, MixedUtmZones, or IoError.
Dataset load_dataset(const DatasetPaths& paths, const std::string& name = "");

/// Loads gnss.csv, odometry.csv and, if present, truth.csv from `dir`.
Dataset load_dataset_dir(const std::filesystem::path& dir);

/// Writes the three UTM-schema CSVs into `dir` (absolute coordinates).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace posefuse
