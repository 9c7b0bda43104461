#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "posefuse/dataset.hpp"
#include "posefuse/utm.hpp"
#include "support.hpp"

using namespace posefuse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("posefuse_dataset_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(ParseGnss, UtmSchema) {
  std::istringstream in(
      "# receiver log\n"
      "t,utm_x,utm_y,zone,epx,epy,epv\n"
      "0,691650.5,5334754.25,32U,2,2.5,4\n"
      "1,691660.5,5334754.25,32U,2,2.5,4\n"
      "2,691670.5,5334755.25,32U,1,1,1\n");
  const RawGnss g = parse_gnss_csv(in);
  ASSERT_EQ(g.readings.size(), 3u);
  EXPECT_EQ(g.zone, "32U");
  EXPECT_EQ(g.readings[1].x, 691660.5);
  EXPECT_EQ(g.readings[0].epy, 2.5);
  EXPECT_EQ(g.readings[2].y, 5334755.25);
  EXPECT_EQ(g.readings[2].epv, 1.0);
}

TEST(ParseGnss, ColumnOrderIsFree) {
  std::istringstream in("epx,epy,epv,utm_y,utm_x,zone,t\n2,2,2,20,10,32U,0.5\n");
  const RawGnss g = parse_gnss_csv(in);
  EXPECT_EQ(g.readings[0].x, 10.0);
  EXPECT_EQ(g.readings[0].y, 20.0);
  EXPECT_EQ(g.readings[0].t, 0.5);
}

TEST(ParseGnss, ErrorsNameTheLine) {
  std::istringstream bad("t,utm_x,utm_y,zone,epx,epy,epv\n0,1,2,32U,2,2,2\n1,abc,2,32U,2,2,2\n");
  try {
    parse_gnss_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream order("t,utm_x,utm_y,zone,epx,epy,epv\n0,1,2,32U,2,2,2\n2,1,2,32U,2,2,2\n1,1,2,32U,2,2,2\n");
  try {
    parse_gnss_csv(order);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonicTimestamps);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  std::istringstream zones("t,utm_x,utm_y,zone,epx,epy,epv\n0,1,2,32U,2,2,2\n1,1,2,33U,2,2,2\n");
  EXPECT_POSEFUSE_ERROR(parse_gnss_csv(zones), ErrorCode::MixedUtmZones);
  std::istringstream header("t,x,y\n0,1,2\n");
  EXPECT_POSEFUSE_ERROR(parse_gnss_csv(header), ErrorCode::ParseError);
}

TEST(ParseOdometry, Basic) {
  std::istringstream in("velocity,t,yaw_rate\n10,0,0.1\n10.5,0.04,0.2\n");
  const auto o = parse_odometry_csv(in);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[1].velocity, 10.5);
  EXPECT_EQ(o[1].yaw_rate, 0.2);
  std::istringstream short_row("t,yaw_rate,velocity\n0,1\n");
  EXPECT_POSEFUSE_ERROR(parse_odometry_csv(short_row), ErrorCode::ParseError);
}

TEST(LoadDataset, LatLonAndUtmAgree) {
  const fs::path dir = scratch("latlon");
  const double lat0 = 48.137154, lon0 = 11.576124;
  std::ostringstream ll, utm;
  ll << "t,lat,lon,epx,epy,epv\n";
  utm << "t,utm_x,utm_y,zone,epx,epy,epv\n";
  ll.precision(17);
  utm.precision(17);
  for (int i = 0; i < 5; ++i) {
    const double lat = lat0 + 1e-4 * i, lon = lon0 + 2e-4 * i;
    const UtmCoordinate c = latlon_to_utm(lat, lon);
    ll << i << "," << lat << "," << lon << ",2,2,2\n";
    utm << i << "," << c.easting << "," << c.northing << "," << c.zone() << ",2,2,2\n";
  }
  write(dir / "ll.csv", ll.str());
  write(dir / "utm.csv", utm.str());
  write(dir / "odo.csv", "t,yaw_rate,velocity\n0,0,1\n4,0,1\n");
  const Dataset a = load_dataset({dir / "ll.csv", dir / "odo.csv", std::nullopt});
  const Dataset b = load_dataset({dir / "utm.csv", dir / "odo.csv", std::nullopt});
  ASSERT_EQ(a.gnss.size(), b.gnss.size());
  EXPECT_EQ(a.gnss[0].x, 0.0);
  EXPECT_EQ(a.gnss[0].y, 0.0);
  for (std::size_t i = 0; i < a.gnss.size(); ++i) {
    EXPECT_NEAR(a.gnss[i].x, b.gnss[i].x, 0.01);
    EXPECT_NEAR(a.gnss[i].y, b.gnss[i].y, 0.01);
  }
  EXPECT_NEAR(a.frame_origin.x, 691650.3668499767, 0.01);
  EXPECT_EQ(a.utm_zone.substr(0, 2), "32");
  EXPECT_EQ(b.utm_zone.substr(0, 2), "32");
}

TEST(LoadDataset, SaveRoundTrip) {
  const fs::path dir = scratch("roundtrip");
  write(dir / "gnss.csv", "t,utm_x,utm_y,zone,epx,epy,epv\n0,500100,4000200,31N,2,2,3\n1,500110.25,4000200,31N,2,2,3\n");
  write(dir / "odometry.csv", "t,yaw_rate,velocity\n0,0,10.25\n0.5,0,10.25\n1,0,10.25\n");
  write(dir / "truth.csv", "t,utm_x,utm_y\n0,500100.5,4000200\n1,500110.5,4000200\n");
  const Dataset d = load_dataset_dir(dir);
  EXPECT_EQ(d.truth.size(), 2u);
  EXPECT_EQ(d.truth[0].x, 0.5);
  EXPECT_EQ(d.gnss[1].x, 10.25);
  const fs::path out = scratch("roundtrip_out");
  save_dataset(d, out);
  const Dataset e = load_dataset_dir(out);
  ASSERT_EQ(e.gnss.size(), d.gnss.size());
  for (std::size_t i = 0; i < d.gnss.size(); ++i) {
    EXPECT_EQ(e.gnss[i].x, d.gnss[i].x);
    EXPECT_EQ(e.gnss[i].y, d.gnss[i].y);
  }
  EXPECT_EQ(e.frame_origin.x, d.frame_origin.x);
  EXPECT_EQ(e.odometry.size(), 3u);
}

TEST(LoadDataset, MissingFileIsIoError) {
  EXPECT_POSEFUSE_ERROR(load_dataset({"/nonexistent/gnss.csv", "/nonexistent/odo.csv", std::nullopt}),
                        ErrorCode::IoError);
}
