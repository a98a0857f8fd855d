#pragma once

#include <Eigen/Core>

namespace sphcov {

/// Mean Earth radius used throughout the package when distances are
/// expressed in kilometers.
inline constexpr double kEarthRadiusKm = 6378.0;

/// A point on the unit sphere, stored as longitude/latitude in degrees
/// together with its unit 3-vector. Longitude is normalized to 0 at the
/// poles so that the (lon, lat) representation is unique.
class SpherePoint {
 public:
  /// Origin (lon 0, lat 0).
  SpherePoint() : SpherePoint(0.0, 0.0) {}

  /// lon in [-180, 180] degrees, lat in [-90, 90] degrees.
  SpherePoint(double lon_deg, double lat_deg);

  /// Builds a point from any nonzero 3-vector (normalized internally).
  static SpherePoint from_vector(const Eigen::Vector3d& v);

  double lon() const { return lon_; }
  double lat() const { return lat_; }
  const Eigen::Vector3d& unit_vector() const { return vec_; }

 private:
  double lon_;
  double lat_;
  Eigen::Vector3d vec_;
};

/// A point on the sphere paired with a time coordinate (years in the
/// reference application). Time must be finite.
struct SpaceTimeLocation {
  SpaceTimeLocation() : point(), time(0.0) {}
  SpaceTimeLocation(SpherePoint p, double t);

  SpherePoint point;
  double time;
};

/// Great-circle angle between two points, in radians within [0, pi].
///
/// Uses atan2(|a x b|, a . b) rather than acos(a . b); the dot-product
/// form loses half the significant digits near 0 and pi.
double geodesic_angle(const SpherePoint& a, const SpherePoint& b);

/// Great-circle distance in kilometers on a sphere of the given radius.
/// Throws std::invalid_argument for a nonpositive radius.
double geodesic_km(const SpherePoint& a, const SpherePoint& b,
                   double radius_km = kEarthRadiusKm);

double deg2rad(double deg);
double rad2deg(double rad);

}  // namespace sphcov
