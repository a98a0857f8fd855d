#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "sphcov/specfun.hpp"

using namespace sphcov;

namespace {

// Half-integer closed forms K_{1/2}, K_{3/2}, K_{5/2}: the independent
// oracle for the series/continued-fraction implementation.
double bessel_k_half_integer(int half_order, double z) {
  const double base = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
  switch (half_order) {
    case 0: return base;                                     // K_{1/2}
    case 1: return base * (1.0 + 1.0 / z);                   // K_{3/2}
    case 2: return base * (1.0 + 3.0 / z + 3.0 / (z * z));   // K_{5/2}
    default: return 0.0;
  }
}

// Gegenbauer by brute force: Taylor coefficients of the generating function
// (1 + r^2 - 2 r x)^-lambda extracted by a trapezoid contour integral.
double gegenbauer_generating(int n, double lambda, double x) {
  if (lambda == 0.0) return std::cos(n * std::acos(x));
  const int steps = 512;
  const double radius = 0.5;
  double re = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double t = 2.0 * std::numbers::pi * k / steps;
    const double rr = radius * std::cos(t);
    const double ri = radius * std::sin(t);
    // w = 1 + r^2 - 2 r x at r = rr + i ri
    const double wr = 1.0 + rr * rr - ri * ri - 2.0 * rr * x;
    const double wi = 2.0 * rr * ri - 2.0 * ri * x;
    const double mod = std::sqrt(wr * wr + wi * wi);
    const double arg = std::atan2(wi, wr);
    const double fm = std::pow(mod, -lambda);
    const double fa = -lambda * arg;
    // f * exp(-i n t)
    re += fm * std::cos(fa - n * t);
  }
  return re / steps / std::pow(radius, n);
}

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("completely monotone catalog values") {
  const auto pow_exp = CompletelyMonotoneSpec::pow_exp(3.0, 1.0);
  CHECK(eval_cm(pow_exp, 1.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(eval_cm(pow_exp, 0.0) == 1.0);

  const auto cauchy = CompletelyMonotoneSpec::gen_cauchy(2.0, 0.5, 1.5);
  CHECK(eval_cm(cauchy, 0.0) == 1.0);
  CHECK(eval_cm(cauchy, 4.0) ==
        doctest::Approx(std::pow(5.0, -1.5)).epsilon(1e-12));

  // K_{1/2} closed form collapses the Matern entry to exp(-c sqrt(t)).
  const auto matern_half = CompletelyMonotoneSpec::matern(1.0, 0.5);
  CHECK(eval_cm(matern_half, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(eval_cm(matern_half, 0.0) == 1.0);

  const auto sech = CompletelyMonotoneSpec::hyperbolic_secant_pow(1.0, 2.0);
  CHECK(eval_cm(sech, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval_cm(sech, 1.0) ==
        doctest::Approx(4.0 * std::pow(std::exp(1.0) + std::exp(-1.0), -2.0))
            .epsilon(1e-12));
}

TEST_CASE("completely monotone parameter restrictions") {
  CHECK_THROWS_AS(CompletelyMonotoneSpec::pow_exp(-1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompletelyMonotoneSpec::pow_exp(1.0, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompletelyMonotoneSpec::matern(1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompletelyMonotoneSpec::gen_cauchy(1.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("bernstein catalog values") {
  const auto pp1 = BernsteinSpec::power_plus_one(1.7, 1.0, 1.0);
  CHECK(eval_bernstein(pp1, 0.0) == 1.0);
  CHECK(eval_bernstein(pp1, 2.0) == doctest::Approx(4.4).epsilon(1e-12));

  const auto logf = BernsteinSpec::log_form(1.0, 1.0, std::numbers::e);
  CHECK(eval_bernstein(logf, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto rat = BernsteinSpec::rational_form(2.0, 1.0, 0.5);
  CHECK(eval_bernstein(rat, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // limit (a t + b)/(b (a t + 1)) -> 1/b = 2 as t grows
  CHECK(eval_bernstein(rat, 1e9) == doctest::Approx(2.0).epsilon(1e-6));

  CHECK_THROWS_AS(BernsteinSpec::power_plus_one(0.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BernsteinSpec::log_form(1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BernsteinSpec::rational_form(1.0, 1.0, 1.5),
                  std::invalid_argument);
}

TEST_CASE("monotonicity and convexity on the spec grid") {
  const std::vector<CompletelyMonotoneSpec> cms = {
      CompletelyMonotoneSpec::pow_exp(1.3, 0.7),
      CompletelyMonotoneSpec::matern(1.0, 1.5),
      CompletelyMonotoneSpec::gen_cauchy(0.8, 1.0, 2.0),
      CompletelyMonotoneSpec::hyperbolic_secant_pow(1.1, 1.0)};
  for (const auto& g : cms) {
    double prev = g(0.0);
    double prev_diff = 0.0;
    bool first = true;
    for (int k = 1; k <= 100; ++k) {
      const double t = 0.1 * k;
      const double cur = g(t);
      CHECK(cur <= prev + 1e-14);  // nonincreasing
      const double diff = cur - prev;
      if (!first) CHECK(diff >= prev_diff - 1e-12);  // convex: diffs increase
      prev_diff = diff;
      prev = cur;
      first = false;
    }
  }

  const std::vector<BernsteinSpec> fs = {
      BernsteinSpec::power_plus_one(1.7, 1.0, 1.0),
      BernsteinSpec::power_plus_one(0.9, 0.6, 0.8),
      BernsteinSpec::log_form(1.0, 1.0, 2.0),
      BernsteinSpec::rational_form(1.0, 0.9, 0.5)};
  for (const auto& f : fs) {
    double prev = f(0.0);
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 100; ++k) {
      const double t = 0.1 * k;
      const double cur = f(t);
      CHECK(cur >= prev - 1e-14);  // nondecreasing
      const double diff = cur - prev;
      CHECK(diff <= prev_diff + 1e-12);  // concave: diffs decrease
      prev_diff = diff;
      prev = cur;
    }
    CHECK(f(0.0) > 0.0);
  }
}

TEST_CASE("gegenbauer known values") {
  CHECK(gegenbauer(0, 1.3, 0.2) == 1.0);
  CHECK(gegenbauer(2, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gegenbauer(3, 0.5, 0.5) == doctest::Approx(-0.4375).epsilon(1e-12));
  // Chebyshev limit
  CHECK(gegenbauer(4, 0.0, 0.3) ==
        doctest::Approx(std::cos(4 * std::acos(0.3))).epsilon(1e-12));
  CHECK_THROWS_AS(gegenbauer(-1, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gegenbauer(2, 0.5, 1.5), std::invalid_argument);
}

TEST_CASE("gegenbauer matches the generating function") {
  for (const double lambda : {0.0, 0.5, 1.0, 1.5}) {
    for (int n = 0; n <= 8; ++n) {
      for (const double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        CHECK(gegenbauer(n, lambda, x) ==
              doctest::Approx(gegenbauer_generating(n, lambda, x))
                  .epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("bessel_k half-integer oracle") {
  CHECK(bessel_k(0.5, 1.0) == doctest::Approx(0.46106850444789454).epsilon(1e-12));
  CHECK(bessel_k(1.5, 2.0) == doctest::Approx(0.1799066579520922).epsilon(1e-12));
  for (const double z : {1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 20.0, 50.0}) {
    for (const int h : {0, 1, 2}) {
      const double nu = h + 0.5;
      const double expected = bessel_k_half_integer(h, z);
      CHECK(bessel_k(nu, z) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
  // even in nu
  CHECK(bessel_k(-0.5, 1.3) == bessel_k(0.5, 1.3));
  CHECK_THROWS_AS(bessel_k(0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(0.5, -1.0), std::domain_error);
}

TEST_CASE("bessel_k reference values at non-half-integer orders") {
  // Frozen from an independent high-precision evaluation.
  CHECK(bessel_k(2.5, 0.7) == doctest::Approx(8.486341592801384).epsilon(1e-10));
  CHECK(bessel_k(3.7, 0.001) ==
        doctest::Approx(3411810326257.2886).epsilon(1e-9));
  CHECK(bessel_k(0.3, 45.0) ==
        doctest::Approx(5.3387342873170496e-21).epsilon(1e-9));
}

}  // TEST_SUITE
