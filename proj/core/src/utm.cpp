#include "posefuse/utm.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kSemiMajor = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kScale = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

struct KruegerSeries {
  double rectifying_radius;
  double eccentricity;
  std::array<double, 6> alpha;
};

KruegerSeries make_series() {
  const double n = kFlattening / (2.0 - kFlattening);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  KruegerSeries s{};
  s.rectifying_radius = kSemiMajor / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  s.eccentricity = std::sqrt(kFlattening * (2.0 - kFlattening));
  s.alpha = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 +
          7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0 -
          1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0,
  };
  return s;
}

const KruegerSeries& series() {
  static const KruegerSeries s = make_series();
  return s;
}

char band_letter(double latitude_deg) {
  static constexpr char kBands[] = "CDEFGHJKLMNPQRSTUVWX";
  if (latitude_deg >= 72.0) return 'X';
  if (latitude_deg < -80.0) return 'C';
  return kBands[static_cast<int>(std::floor((latitude_deg + 80.0) / 8.0))];
}

void check_domain(double latitude_deg, double longitude_deg) {
  if (!std::isfinite(latitude_deg) || !std::isfinite(longitude_deg)) {
    throw Error(ErrorCode::InvalidArgument, "latitude/longitude must be finite");
  }
  if (std::abs(latitude_deg) > 84.0) {
    throw Error(ErrorCode::OutOfUtmDomain, fmt::format("latitude {} outside UTM coverage", latitude_deg));
  }
}

}  // namespace

std::string UtmCoordinate::zone() const { return fmt::format("{}{}", zone_number, band); }

int utm_zone_for(double latitude_deg, double longitude_deg) {
  double lon = std::fmod(longitude_deg + 180.0, 360.0);
  if (lon < 0) lon += 360.0;
  int zone = static_cast<int>(std::floor(lon / 6.0)) + 1;
  if (zone > 60) zone = 60;
  const double l = lon - 180.0;
  if (latitude_deg >= 56.0 && latitude_deg < 64.0 && l >= 3.0 && l < 12.0) {
    return 32;
  }
  if (latitude_deg >= 72.0 && latitude_deg <= 84.0) {
    if (l >= 0.0 && l < 9.0) return 31;
    if (l >= 9.0 && l < 21.0) return 33;
    if (l >= 21.0 && l < 33.0) return 35;
    if (l >= 33.0 && l < 42.0) return 37;
  }
  return zone;
}

UtmCoordinate latlon_to_utm(double latitude_deg, double longitude_deg) {
  check_domain(latitude_deg, longitude_deg);
  return latlon_to_utm(latitude_deg, longitude_deg, utm_zone_for(latitude_deg, longitude_deg),
                       latitude_deg >= 0.0);
}

UtmCoordinate latlon_to_utm(double latitude_deg, double longitude_deg, int zone_number, bool north) {
  check_domain(latitude_deg, longitude_deg);
  if (zone_number < 1 || zone_number > 60) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("invalid UTM zone {}", zone_number));
  }
  const KruegerSeries& s = series();
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double phi = latitude_deg * kDeg;
  const double central = (zone_number - 1) * 6.0 - 180.0 + 3.0;
  double dlon = std::remainder(longitude_deg - central, 360.0);
  const double lambda = dlon * kDeg;

  const double sin_phi = std::sin(phi);
  const double tau = std::sinh(std::atanh(sin_phi) - s.eccentricity * std::atanh(s.eccentricity * sin_phi));
  const double xi_p = std::atan2(tau, std::cos(lambda));
  const double eta_p = std::atanh(std::sin(lambda) / std::sqrt(1.0 + tau * tau));

  double xi = xi_p;
  double eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[static_cast<std::size_t>(j - 1)];
    xi += a * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += a * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }

  UtmCoordinate out;
  out.easting = kFalseEasting + kScale * s.rectifying_radius * eta;
  out.northing = kScale * s.rectifying_radius * xi + (north ? 0.0 : kFalseNorthingSouth);
  out.zone_number = zone_number;
  out.north = north;
  out.band = band_letter(latitude_deg);
  return out;
}

}  // namespace posefuse
