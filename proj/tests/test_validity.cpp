#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sphcov/models.hpp"
#include "sphcov/validity.hpp"

using namespace sphcov;

namespace {

Eigen::MatrixXd scalar(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

// Univariate marginal of the n = 1 modified Gneiting instance
// (g = exp(-3t), f = 1 + 1.7 t / c_t), parameterized in radians.
double modified1_marginal(double theta, double u, double c, double c_t) {
  const double fu = 1.0 + 1.7 * std::fabs(u) / c_t;
  return std::exp(-3.0 * theta * fu / c) / (fu * fu * fu);
}

}  // namespace

TEST_SUITE("validity") {

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  double quad = 0.0, quartic = 0.0, total = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    total += w[q];
    quad += w[q] * x[q] * x[q];
    quartic += w[q] * std::pow(x[q], 20);
  }
  CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(quad == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(quartic == doctest::Approx(2.0 / 21.0).epsilon(1e-13));
}

TEST_CASE("constant function expands to B0 only") {
  for (const int d : {1, 2, 3}) {
    const auto report =
        schoenberg_matrices([](double) { return scalar(1.0); }, 1, d);
    CHECK(report.coefficients[0](0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    for (int n = 1; n <= report.max_order; ++n) {
      CHECK(std::fabs(report.coefficients[static_cast<std::size_t>(n)](0, 0)) <=
            1e-10);
    }
    CHECK(report.quadrature_converged);
    CHECK(report.max_tail_mass <= 1e-9);
  }
}

TEST_CASE("cosine on the circle isolates B1") {
  const auto report = schoenberg_matrices(
      [](double theta) { return scalar(std::cos(theta)); }, 1, 1);
  CHECK(report.coefficients[1](0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  for (int n = 0; n <= report.max_order; ++n) {
    if (n == 1) continue;
    CHECK(std::fabs(report.coefficients[static_cast<std::size_t>(n)](0, 0)) <=
          1e-10);
  }
}

TEST_CASE("gaussian of geodesic distance is refuted on S^2") {
  const auto report = schoenberg_matrices(
      [](double theta) { return scalar(std::exp(-theta * theta)); }, 1, 2);
  CHECK(report.min_diagonal < -1e-6);
  CHECK_FALSE(report.supported());
  // location of the first violation, frozen from a high-resolution run
  CHECK(report.coefficients[8](0, 0) ==
        doctest::Approx(-2.254629452423488e-6).epsilon(1e-6));
  CHECK(report.quadrature_converged);
}

TEST_CASE("modified gneiting marginal is supported on d = 2 and 3") {
  SchoenbergOptions options;
  options.max_order = 30;
  for (const int d : {2, 3}) {
    const auto report = schoenberg_matrices(
        [](double theta) { return scalar(modified1_marginal(theta, 0.0, 0.3, 1.0)); },
        1, d, options);
    CHECK(report.min_diagonal >= -1e-6);
    CHECK(report.supported());
    CHECK(report.quadrature_converged);
  }
}

TEST_CASE("doubling quadrature nodes moves coefficients below 1e-8") {
  SchoenbergOptions coarse, fine;
  coarse.nodes = 512;
  fine.nodes = 1024;
  const MatrixFunction psi = [](double theta) {
    return scalar(modified1_marginal(theta, 0.0, 0.3, 1.0));
  };
  const auto a = schoenberg_matrices(psi, 1, 2, coarse);
  const auto b = schoenberg_matrices(psi, 1, 2, fine);
  double worst = 0.0;
  for (std::size_t n = 0; n < a.coefficients.size(); ++n) {
    worst = std::max(worst,
                     std::fabs(a.coefficients[n](0, 0) - b.coefficients[n](0, 0)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("monotone class inclusion d=3 implies d=2") {
  // Functions certified on S^3 must stay certified on S^2.
  const std::vector<MatrixFunction> candidates = {
      [](double theta) { return scalar(modified1_marginal(theta, 0.0, 0.3, 1.0)); },
      [](double theta) { return scalar(modified1_marginal(theta, 1.5, 1.0, 2.0)); },
      [](double theta) { return scalar(std::exp(-2.0 * theta)); },
  };
  SchoenbergOptions options;
  options.max_order = 30;
  for (const auto& psi : candidates) {
    const auto d3 = schoenberg_matrices(psi, 1, 3, options);
    const auto d2 = schoenberg_matrices(psi, 1, 2, options);
    if (d3.supported()) CHECK(d2.supported());
  }
}

TEST_CASE("separable cov factorizes across lags") {
  // C(theta, u) = psi(theta) rho(u) with rho(u) = exp(-u^2 / 4)... the
  // coefficient functions must factor as B_n rho(u).
  const auto psi = [](double theta) { return std::exp(-2.0 * theta); };
  const auto rho = [](double u) { return std::exp(-0.25 * u * u); };
  const SpaceTimeMatrixFunction cov = [&](double theta, double u) {
    return scalar(psi(theta) * rho(u));
  };
  SchoenbergOptions options;
  options.max_order = 12;
  const auto lags = uniform_lags(8, 0.5);
  const auto report = schoenberg_functions(cov, 1, 2, lags, options);
  const auto base = schoenberg_matrices(
      [&](double theta) { return scalar(psi(theta)); }, 1, 2, options);
  for (int n = 0; n <= options.max_order; ++n) {
    for (Eigen::Index l = 0; l < lags.size(); ++l) {
      const double expected = base.coefficients[static_cast<std::size_t>(n)](0, 0) *
                              rho(lags[l]);
      CHECK(report.lag_coefficients[static_cast<std::size_t>(n)]
                                   [static_cast<std::size_t>(l)](0, 0) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
  CHECK(report.temporal_psd);
}

TEST_CASE("lag zero slice reduces to schoenberg_matrices") {
  const SpaceTimeMatrixFunction cov = [](double theta, double u) {
    return scalar(modified1_marginal(theta, u, 0.5, 1.0));
  };
  SchoenbergOptions options;
  options.max_order = 20;
  const auto fn_report =
      schoenberg_functions(cov, 1, 2, uniform_lags(6, 0.4), options);
  const auto mat_report = schoenberg_matrices(
      [&cov](double theta) { return cov(theta, 0.0); }, 1, 2, options);
  for (int n = 0; n <= options.max_order; ++n) {
    CHECK(fn_report.coefficients[static_cast<std::size_t>(n)](0, 0) ==
          doctest::Approx(mat_report.coefficients[static_cast<std::size_t>(n)](0, 0))
              .epsilon(1e-12));
  }
}

TEST_CASE("modified gneiting space-time slices pass temporal evidence") {
  // d = 3 is the edge of the n = 1 guarantee d <= 2n+1.
  const SpaceTimeMatrixFunction cov = [](double theta, double u) {
    return scalar(modified1_marginal(theta, u, 0.3, 1.0));
  };
  SchoenbergOptions options;
  options.max_order = 30;
  const auto report =
      schoenberg_functions(cov, 1, 3, uniform_lags(16, 0.25), options);
  CHECK(report.min_diagonal >= -1e-6);
  CHECK(report.temporal_psd);
  CHECK(report.supported());
}

TEST_CASE("multivariate coefficients have nonnegative eigenvalues") {
  const ModelSpec c(ModelC{1.85, 4.69e-5, 0.28, 2901.0, 2245.0, 22.92});
  const double radius = kEarthRadiusKm;
  const MatrixFunction psi = [&](double theta_rad) {
    Eigen::MatrixXd v(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        v(i, j) = c.cov(i, j, theta_rad * radius, 0.0);
      }
    }
    return v;
  };
  SchoenbergOptions options;
  options.max_order = 30;
  const auto report = schoenberg_matrices(psi, 2, 2, options);
  CHECK(report.min_eigenvalue >= -1e-6);
  CHECK(report.min_diagonal >= -1e-6);
  CHECK(report.supported());
}

TEST_CASE("min_eigen_check") {
  CHECK_THROWS_AS(min_eigen_check(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);

  const auto id = min_eigen_check(Eigen::MatrixXd::Identity(3, 3));
  CHECK(id.psd);
  CHECK(id.lambda_min == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 1.2, 1.2, 1.0;
  const auto bad = min_eigen_check(indefinite);
  CHECK_FALSE(bad.psd);
  CHECK(bad.lambda_min == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(bad.lambda_max == doctest::Approx(2.2).epsilon(1e-12));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.5 + 1e-8, 1.0;
  CHECK_THROWS_AS(min_eigen_check(asym), std::invalid_argument);

  // Model C assembled on random points is numerically PSD.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SpaceTimeLocation> locs;
  std::vector<int> vars;
  for (int k = 0; k < 100; ++k) {
    locs.emplace_back(SpherePoint(-180.0 + 360.0 * u(rng),
                                  rad2deg(std::asin(2.0 * u(rng) - 1.0))),
                      static_cast<double>(k % 5));
    vars.push_back(k % 2);
  }
  const ModelSpec c(ModelC{1.85, 4.69e-5, 0.28, 2901.0, 2245.0, 22.92});
  const auto cov = assemble_covariance(locs, vars, c);
  CHECK(min_eigen_check(cov.values).psd);
}

TEST_CASE("quadrature nonconvergence is flagged, not silent") {
  // A discontinuous integrand defeats fixed-order Gauss-Legendre; the
  // report must flag the disagreement between node counts.
  SchoenbergOptions options;
  options.nodes = 16;
  options.max_order = 10;
  const auto report = schoenberg_matrices(
      [](double theta) { return scalar(theta < 1.0 ? 1.0 : 0.0); }, 1, 2,
      options);
  CHECK_FALSE(report.quadrature_converged);
  CHECK(report.quadrature_disagreement > 1e-8);
}

}  // TEST_SUITE
