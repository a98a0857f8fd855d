#include "sphcov/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphcov {

namespace {
constexpr double kPi = std::numbers::pi;
}

double deg2rad(double deg) { return deg * kPi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / kPi; }

SpherePoint::SpherePoint(double lon_deg, double lat_deg) {
  if (!std::isfinite(lon_deg) || lon_deg < -180.0 || lon_deg > 180.0) {
    throw std::invalid_argument("SpherePoint: longitude " +
                                std::to_string(lon_deg) +
                                " outside [-180, 180]");
  }
  if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
    throw std::invalid_argument("SpherePoint: latitude " +
                                std::to_string(lat_deg) +
                                " outside [-90, 90]");
  }
  if (lat_deg == 90.0 || lat_deg == -90.0) lon_deg = 0.0;
  lon_ = lon_deg;
  lat_ = lat_deg;
  const double lon = deg2rad(lon_deg);
  const double lat = deg2rad(lat_deg);
  vec_ = Eigen::Vector3d(std::cos(lat) * std::cos(lon),
                         std::cos(lat) * std::sin(lon), std::sin(lat));
  vec_.normalize();
}

SpherePoint SpherePoint::from_vector(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("SpherePoint::from_vector: zero or non-finite vector");
  }
  const Eigen::Vector3d u = v / norm;
  const double lat = rad2deg(std::asin(std::clamp(u.z(), -1.0, 1.0)));
  double lon = rad2deg(std::atan2(u.y(), u.x()));
  if (lon < -180.0) lon = -180.0;
  if (lon > 180.0) lon = 180.0;
  return SpherePoint(lon, lat);
}

SpaceTimeLocation::SpaceTimeLocation(SpherePoint p, double t)
    : point(p), time(t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("SpaceTimeLocation: time must be finite");
  }
}

double geodesic_angle(const SpherePoint& a, const SpherePoint& b) {
  const Eigen::Vector3d& x = a.unit_vector();
  const Eigen::Vector3d& y = b.unit_vector();
  const double cross = x.cross(y).norm();
  const double dot = x.dot(y);
  const double angle = std::atan2(cross, dot);
  return std::clamp(angle, 0.0, kPi);
}

double geodesic_km(const SpherePoint& a, const SpherePoint& b,
                   double radius_km) {
  if (!(radius_km > 0.0) || !std::isfinite(radius_km)) {
    throw std::invalid_argument("geodesic_km: radius must be positive");
  }
  return radius_km * geodesic_angle(a, b);
}

}  // namespace sphcov
