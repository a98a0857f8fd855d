#include "sphcov/validity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphcov/parallel.hpp"

namespace sphcov {

namespace {

constexpr double kPi = std::numbers::pi;

void gauss_legendre_on_0_pi(int n, std::vector<double>& theta,
                            std::vector<double>& weight) {
  gauss_legendre(n, theta, weight);
  for (int q = 0; q < n; ++q) {
    theta[q] = (theta[q] + 1.0) * (kPi / 2.0);
    weight[q] *= kPi / 2.0;
  }
}

// Quadrature of all coefficient matrices for one node count. psi_values[q]
// holds psi(theta_q); the Gegenbauer recurrence runs across n with per-node
// state so each node is visited once per order.
std::vector<Eigen::MatrixXd> coefficients_at(
    const std::vector<Eigen::MatrixXd>& psi_values,
    const std::vector<double>& theta, const std::vector<double>& weight, int m,
    int d, int max_order) {
  const int nq = static_cast<int>(theta.size());
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(max_order) + 1,
                                   Eigen::MatrixXd::Zero(m, m));

  if (d == 1) {
    for (int n = 0; n <= max_order; ++n) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
      for (int q = 0; q < nq; ++q) {
        acc += weight[q] * std::cos(n * theta[q]) * psi_values[q];
      }
      out[static_cast<std::size_t>(n)] = (n == 0 ? 1.0 : 2.0) / kPi * acc;
    }
    return out;
  }

  const double lambda = 0.5 * (d - 1);
  const double gamma_factor =
      std::pow(std::tgamma(lambda), 2) / std::tgamma(static_cast<double>(d) - 1.0);
  std::vector<double> x(nq), sin_pow(nq), g_prev(nq), g_curr(nq);
  for (int q = 0; q < nq; ++q) {
    x[q] = std::cos(theta[q]);
    sin_pow[q] = std::pow(std::sin(theta[q]), d - 1);
  }
  for (int n = 0; n <= max_order; ++n) {
    if (n == 0) {
      std::fill(g_curr.begin(), g_curr.end(), 1.0);
    } else if (n == 1) {
      g_prev = g_curr;
      for (int q = 0; q < nq; ++q) g_curr[q] = 2.0 * lambda * x[q];
    } else {
      for (int q = 0; q < nq; ++q) {
        const double next = (2.0 * x[q] * (n + lambda - 1.0) * g_curr[q] -
                             (n + 2.0 * lambda - 2.0) * g_prev[q]) /
                            static_cast<double>(n);
        g_prev[q] = g_curr[q];
        g_curr[q] = next;
      }
    }
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < nq; ++q) {
      acc += weight[q] * g_curr[q] * sin_pow[q] * psi_values[q];
    }
    const double pref =
        (2.0 * n + d - 1.0) / (std::pow(2.0, 3 - d) * kPi) * gamma_factor;
    out[static_cast<std::size_t>(n)] = pref * acc;
  }
  return out;
}

std::vector<Eigen::MatrixXd> evaluate_at_nodes(const MatrixFunction& psi,
                                               const std::vector<double>& theta,
                                               int m) {
  std::vector<Eigen::MatrixXd> values(theta.size());
  parallel_chunks(theta.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      Eigen::MatrixXd v = psi(theta[q]);
      if (v.rows() != m || v.cols() != m) {
        throw std::invalid_argument("schoenberg: psi must return m x m matrices");
      }
      values[q] = std::move(v);
    }
  });
  return values;
}

void validate_options(int m, int d, const SchoenbergOptions& options) {
  if (m < 1) throw std::invalid_argument("schoenberg: require m >= 1");
  if (d < 1) throw std::invalid_argument("schoenberg: require d >= 1");
  if (options.max_order < 0 || options.nodes < 2) {
    throw std::invalid_argument("schoenberg: bad truncation or node count");
  }
}

void summarize_coefficients(SchoenbergReport& report,
                            const Eigen::MatrixXd& psi0) {
  const int m = report.m;
  double min_diag = std::numeric_limits<double>::infinity();
  double min_eig = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
  for (const auto& B : report.coefficients) {
    total += B;
    min_diag = std::min(min_diag, B.diagonal().minCoeff());
    if (m == 1) {
      min_eig = std::min(min_eig, B(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
  }
  report.min_diagonal = min_diag;
  report.min_eigenvalue = min_eig;
  report.tail_mass = (psi0 - total).cwiseAbs();
  report.max_tail_mass = report.tail_mass.maxCoeff();
  report.tail_warning = report.max_tail_mass > 1e-4;
}

double max_entry_difference(const std::vector<Eigen::MatrixXd>& a,
                            const std::vector<Eigen::MatrixXd>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

bool SchoenbergReport::supported(double tol) const {
  if (min_diagonal < -tol || min_eigenvalue < -tol) return false;
  if (!lag_coefficients.empty() && min_temporal_eigenvalue < -tol) return false;
  return true;
}

SchoenbergReport schoenberg_matrices(const MatrixFunction& psi, int m, int d,
                                     const SchoenbergOptions& options) {
  validate_options(m, d, options);

  SchoenbergReport report;
  report.d = d;
  report.m = m;
  report.max_order = options.max_order;
  report.nodes = options.nodes;

  std::vector<double> theta, weight;
  gauss_legendre_on_0_pi(options.nodes, theta, weight);
  const auto values = evaluate_at_nodes(psi, theta, m);
  report.coefficients =
      coefficients_at(values, theta, weight, m, d, options.max_order);

  // Convergence flag: repeat at twice the nodes and compare.
  std::vector<double> theta2, weight2;
  gauss_legendre_on_0_pi(2 * options.nodes, theta2, weight2);
  const auto values2 = evaluate_at_nodes(psi, theta2, m);
  const auto coarse_check =
      coefficients_at(values2, theta2, weight2, m, d, options.max_order);
  report.quadrature_disagreement =
      max_entry_difference(report.coefficients, coarse_check);
  report.quadrature_converged =
      report.quadrature_disagreement <= options.quadrature_tol;

  summarize_coefficients(report, psi(0.0));
  report.tail_warning = report.max_tail_mass > options.tail_warn;
  return report;
}

SchoenbergReport schoenberg_functions(const SpaceTimeMatrixFunction& cov, int m,
                                      int d, const Eigen::VectorXd& lags,
                                      const SchoenbergOptions& options) {
  validate_options(m, d, options);
  const int nl = static_cast<int>(lags.size());
  if (nl < 2) throw std::invalid_argument("schoenberg_functions: need >= 2 lags");
  if (lags[0] != 0.0) {
    throw std::invalid_argument("schoenberg_functions: lag grid must start at 0");
  }
  const double step = lags[1] - lags[0];
  if (!(step > 0.0)) {
    throw std::invalid_argument("schoenberg_functions: lags must be increasing");
  }
  for (int l = 1; l < nl; ++l) {
    if (std::fabs(lags[l] - l * step) > 1e-9 * std::max(1.0, std::fabs(lags[l]))) {
      throw std::invalid_argument("schoenberg_functions: lag grid must be uniform");
    }
  }

  SchoenbergReport report;
  report.d = d;
  report.m = m;
  report.max_order = options.max_order;
  report.nodes = options.nodes;
  report.lags = lags;

  std::vector<double> theta, weight, theta2, weight2;
  gauss_legendre_on_0_pi(options.nodes, theta, weight);
  gauss_legendre_on_0_pi(2 * options.nodes, theta2, weight2);

  report.lag_coefficients.assign(
      static_cast<std::size_t>(options.max_order) + 1,
      std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(nl)));
  double disagreement = 0.0;
  for (int l = 0; l < nl; ++l) {
    const double u = lags[l];
    const MatrixFunction slice = [&cov, u](double th) { return cov(th, u); };
    const auto values = evaluate_at_nodes(slice, theta, m);
    auto coefs = coefficients_at(values, theta, weight, m, d, options.max_order);
    const auto values2 = evaluate_at_nodes(slice, theta2, m);
    const auto check =
        coefficients_at(values2, theta2, weight2, m, d, options.max_order);
    disagreement = std::max(disagreement, max_entry_difference(coefs, check));
    for (int n = 0; n <= options.max_order; ++n) {
      report.lag_coefficients[static_cast<std::size_t>(n)]
                             [static_cast<std::size_t>(l)] =
          std::move(coefs[static_cast<std::size_t>(n)]);
    }
  }
  report.quadrature_disagreement = disagreement;
  report.quadrature_converged = disagreement <= options.quadrature_tol;

  report.coefficients.reserve(report.lag_coefficients.size());
  for (const auto& series : report.lag_coefficients) {
    report.coefficients.push_back(series[0]);  // u = 0 slice
  }
  summarize_coefficients(report, cov(0.0, 0.0));
  report.tail_warning = report.max_tail_mass > options.tail_warn;

  // Temporal evidence: each n-slice must itself be a stationary temporal
  // covariance; test the (block) Toeplitz matrix it induces on the grid.
  double min_temporal = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= options.max_order; ++n) {
    const auto& series = report.lag_coefficients[static_cast<std::size_t>(n)];
    Eigen::MatrixXd T(nl * m, nl * m);
    for (int k = 0; k < nl; ++k) {
      for (int l = 0; l < nl; ++l) {
        T.block(k * m, l * m, m, m) =
            series[static_cast<std::size_t>(std::abs(k - l))];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly);
    min_temporal = std::min(min_temporal, es.eigenvalues().minCoeff());
  }
  report.min_temporal_eigenvalue = min_temporal;
  report.temporal_psd = min_temporal >= -options.coefficient_tol;
  return report;
}

EigenCheck min_eigen_check(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("min_eigen_check: matrix must be square");
  }
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument(
        "min_eigen_check: matrix asymmetric beyond 1e-10 (max |M - M'| = " +
        std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  EigenCheck out;
  out.lambda_min = es.eigenvalues().minCoeff();
  out.lambda_max = es.eigenvalues().maxCoeff();
  out.psd = out.lambda_min >= -tol * std::max(out.lambda_max, 0.0);
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: require n >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_old = z;
      z = z_old - p1 / pp;
      if (std::fabs(z - z_old) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

Eigen::VectorXd uniform_lags(int count, double step) {
  if (count < 2 || !(step > 0.0)) {
    throw std::invalid_argument("uniform_lags: require count >= 2, step > 0");
  }
  Eigen::VectorXd lags(count);
  for (int l = 0; l < count; ++l) lags[l] = l * step;
  return lags;
}

}  // namespace sphcov
