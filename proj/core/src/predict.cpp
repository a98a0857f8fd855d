#include "sphcov/predict.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphcov/parallel.hpp"
#include "sphcov/simulate.hpp"

namespace sphcov {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

CokrigeSolver::CokrigeSolver(const Dataset& data, const ModelSpec& spec,
                             const PredictOptions& options)
    : data_(data), spec_(spec), options_(options) {
  if (data.num_variables() > spec.num_variables()) {
    throw std::invalid_argument("cokrige: dataset has more variables than model");
  }
  AssemblyOptions assembly;
  assembly.radius_km = data.radius_km();
  assembly.max_size = options.max_size;
  sigma_ = assemble_covariance(data.locations(), data.variable_indices(), spec,
                               assembly)
               .values;
  const CholeskyResult chol = cholesky_with_jitter(sigma_);
  jitter_ = chol.jitter;
  Eigen::MatrixXd shifted = sigma_;
  shifted.diagonal().array() += jitter_;
  llt_.compute(shifted);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("cokrige: covariance factorization failed");
  }
  z_ = data.values();
  precision_ = llt_.solve(
      Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols()));
  qz_ = precision_ * z_;
  max_qdiag_ = precision_.diagonal().maxCoeff();
}

Prediction CokrigeSolver::predict(const SpaceTimeLocation& target,
                                  int variable) const {
  if (variable < 0 || variable >= spec_.num_variables()) {
    throw std::invalid_argument("cokrige: variable index out of range");
  }
  const auto n = sigma_.rows();
  Eigen::VectorXd c(n);
  const auto& rows = data_.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& obs = rows[static_cast<std::size_t>(k)];
    const double theta =
        geodesic_km(target.point, obs.point, data_.radius_km());
    c[k] = spec_.cov(variable, obs.variable, theta, target.time - obs.time);
  }
  const Eigen::VectorXd w = llt_.solve(c);
  Prediction out{w.dot(z_), spec_.cov(variable, variable, 0.0, 0.0) - w.dot(c),
                 target, variable};
  if (out.variance < 0.0) {
    if (out.variance < -1e-10) {
      throw std::runtime_error("cokrige: negative kriging variance " +
                               std::to_string(out.variance));
    }
    out.variance = 0.0;
  }
  return out;
}

Prediction CokrigeSolver::solve_dropped(std::size_t k) const {
  // Direct re-solve without row/column k, reusing the assembled Sigma.
  const auto n = sigma_.rows();
  const auto ki = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd reduced(n - 1, n - 1);
  Eigen::VectorXd c(n - 1), zr(n - 1);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ki) continue;
    Eigen::Index s = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == ki) continue;
      reduced(r, s) = sigma_(i, j);
      ++s;
    }
    c[r] = sigma_(i, ki);
    zr[r] = z_[i];
    ++r;
  }
  const CholeskyResult chol = cholesky_with_jitter(reduced);
  reduced.diagonal().array() += chol.jitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(reduced);
  const Eigen::VectorXd w = llt.solve(c);
  const auto& obs = data_.row(k);
  Prediction out{w.dot(zr), sigma_(ki, ki) - w.dot(c),
                 SpaceTimeLocation(obs.point, obs.time), obs.variable};
  if (out.variance < 0.0) out.variance = std::max(out.variance, 0.0);
  return out;
}

Prediction CokrigeSolver::predict_without(std::size_t k) const {
  if (k >= data_.size()) {
    throw std::invalid_argument("predict_without: index out of range");
  }
  const auto ki = static_cast<Eigen::Index>(k);
  const double qkk = precision_(ki, ki);
  if (!(qkk > 0.0) || max_qdiag_ / qkk > options_.downdate_ratio) {
    return solve_dropped(k);
  }
  const auto& obs = data_.row(k);
  Prediction out{z_[ki] - qz_[ki] / qkk, 1.0 / qkk,
                 SpaceTimeLocation(obs.point, obs.time), obs.variable};
  return out;
}

Prediction cokrige(const Dataset& data, const ModelSpec& spec,
                   const SpaceTimeLocation& target, int variable,
                   const PredictOptions& options) {
  return CokrigeSolver(data, spec, options).predict(target, variable);
}

double gaussian_crps(double mu, double sigma, double y) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("gaussian_crps: require sigma >= 0");
  }
  if (sigma == 0.0) return std::fabs(y - mu);
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) -
                  1.0 / std::sqrt(std::numbers::pi));
}

ScoreTable drop_one_cv(const Dataset& data, const ModelSpec& spec,
                       const PredictOptions& options) {
  const CokrigeSolver solver(data, spec, options);
  const int m = data.num_variables();
  const std::size_t n = data.size();

  std::vector<Prediction> predictions(n);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      predictions[k] = solver.predict_without(k);
    }
  });

  ScoreTable table;
  table.mse = Eigen::VectorXd::Zero(m);
  table.crps = Eigen::VectorXd::Zero(m);
  table.count.assign(static_cast<std::size_t>(m), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& obs = data.row(k);
    const auto& pred = predictions[k];
    const double err = obs.value - pred.mean;
    table.mse[obs.variable] += err * err;
    table.crps[obs.variable] +=
        gaussian_crps(pred.mean, std::sqrt(std::max(pred.variance, 0.0)),
                      obs.value);
    ++table.count[static_cast<std::size_t>(obs.variable)];
  }
  for (int v = 0; v < m; ++v) {
    const double cnt = std::max<double>(1.0, static_cast<double>(
                                                 table.count[static_cast<std::size_t>(v)]));
    table.mse[v] /= cnt;
    table.crps[v] /= cnt;
  }
  return table;
}

}  // namespace sphcov
