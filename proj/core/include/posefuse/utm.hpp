#pragma once

#include <string>

namespace posefuse {

struct UtmCoordinate {
  double easting = 0.0;   ///< m, false easting 500 km
  double northing = 0.0;  ///< m, false northing 10000 km south of the equator
  int zone_number = 0;
  char band = 'N';        ///< latitude band letter, C..X
  bool north = true;

  /// Zone identifier such as "32U".
  std::string zone() const;
};

/// Standard UTM zone for a position, including the Norway and Svalbard
/// exceptions.
int utm_zone_for(double latitude_deg, double longitude_deg);

/// WGS-84 Transverse Mercator projection (k0 = 0.9996) using the 6th-order
/// Krueger series, accurate to well below a millimetre inside a zone.
/// Throws OutOfUtmDomain when |latitude| > 84 deg.
UtmCoordinate latlon_to_utm(double latitude_deg, double longitude_deg);

/// Projects into an explicit zone and hemisphere.
UtmCoordinate latlon_to_utm(double latitude_deg, double longitude_deg, int zone_number, bool north);

}  // namespace posefuse
