#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "sphcov/geometry.hpp"

using namespace sphcov;

namespace {
constexpr double kPi = std::numbers::pi;

SpherePoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lon = -180.0 + 360.0 * u(rng);
  const double lat = rad2deg(std::asin(2.0 * u(rng) - 1.0));
  return {lon, lat};
}
}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("unit vector and round trip") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const SpherePoint p = random_point(rng);
    CHECK(std::fabs(p.unit_vector().norm() - 1.0) <= 1e-12);
    if (std::fabs(p.lat()) < 89.0) {
      const SpherePoint back = SpherePoint::from_vector(p.unit_vector());
      CHECK(std::fabs(back.lat() - p.lat()) <= 1e-9);
      CHECK(std::fabs(back.lon() - p.lon()) <= 1e-9);
    }
  }
}

TEST_CASE("construction validates ranges") {
  CHECK_THROWS_AS(SpherePoint(200.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpherePoint(0.0, 95.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceTimeLocation(SpherePoint(0, 0),
                                    std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("pole longitude is normalized") {
  const SpherePoint north(123.0, 90.0);
  CHECK(north.lon() == 0.0);
  CHECK(north.lat() == 90.0);
}

TEST_CASE("geodesic angle identities") {
  const SpherePoint origin(0.0, 0.0);
  CHECK(geodesic_angle(origin, origin) == 0.0);
  CHECK(geodesic_angle(origin, SpherePoint(180.0, 0.0)) ==
        doctest::Approx(kPi).epsilon(1e-14));
  CHECK(geodesic_angle(origin, SpherePoint(90.0, 0.0)) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("geodesic_km scales the angle") {
  const SpherePoint a(0.0, 0.0);
  // 0.2 rad on the radius-6378 sphere is the paper's 1275.6 km cutoff.
  const SpherePoint b = SpherePoint::from_vector(
      {std::cos(0.2), std::sin(0.2), 0.0});
  CHECK(geodesic_km(a, b, 6378.0) == doctest::Approx(1275.6).epsilon(1e-9));
  CHECK(geodesic_km(a, a, 6378.0) == 0.0);
  CHECK(geodesic_km(a, SpherePoint(180.0, 0.0), 1.0) ==
        doctest::Approx(kPi).epsilon(1e-14));
  CHECK_THROWS_AS(geodesic_km(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(geodesic_km(a, b, -1.0), std::invalid_argument);
}

TEST_CASE("symmetry, triangle inequality, stability vs arccos") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 1000; ++k) {
    const SpherePoint a = random_point(rng);
    const SpherePoint b = random_point(rng);
    const SpherePoint c = random_point(rng);
    const double ab = geodesic_angle(a, b);
    CHECK(geodesic_angle(b, a) == ab);  // exact symmetry
    CHECK(ab >= 0.0);
    CHECK(ab <= kPi);
    CHECK(ab <= geodesic_angle(a, c) + geodesic_angle(c, b) + 1e-10);

    const double dot = a.unit_vector().dot(b.unit_vector());
    if (dot > -0.999 && dot < 0.999) {
      CHECK(std::fabs(std::acos(dot) - ab) <= 1e-7);
    }
  }
}

}  // TEST_SUITE
