#pragma once

#include <cmath>
#include <numbers>

namespace railelec::geo {

inline constexpr double kEarthRadiusKm = 6371.0;

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Great-circle distance in km between two lat/lon points (degrees), haversine form.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double dlat = deg2rad(lat2 - lat1);
  const double dlon = deg2rad(lon2 - lon1);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(deg2rad(lat1)) * std::cos(deg2rad(lat2)) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::fmin(1.0, h)));
}

}  // namespace railelec::geo
