#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sphcov/dataset.hpp"
#include "sphcov/models.hpp"

namespace sphcov {

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  SpaceTimeLocation target;
  int variable = 0;
};

struct PredictOptions {
  std::size_t max_size = 5000;
  double downdate_ratio = 1e6;  // fall back to a direct re-solve beyond this
};

/// Simple (zero-mean) cokriging from all observations. The covariance
/// factorization is done once at construction and reused across targets.
class CokrigeSolver {
 public:
  CokrigeSolver(const Dataset& data, const ModelSpec& spec,
                const PredictOptions& options = {});

  /// mean = c' Sigma^-1 z, variance = C_vv(0,0) - c' Sigma^-1 c.
  Prediction predict(const SpaceTimeLocation& target, int variable) const;

  /// Drop-one prediction of observation k from all remaining rows, via the
  /// precision-matrix identity; re-solves directly when the conditioning
  /// ratio max_j Q_jj / Q_kk exceeds options.downdate_ratio.
  Prediction predict_without(std::size_t k) const;

  double applied_jitter() const { return jitter_; }

 private:
  Prediction solve_dropped(std::size_t k) const;

  const Dataset& data_;
  const ModelSpec& spec_;
  PredictOptions options_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd sigma_;      // assembled covariance (pre-jitter)
  Eigen::MatrixXd precision_;  // Q = (Sigma + jitter I)^-1
  Eigen::VectorXd qz_;         // Q z
  Eigen::VectorXd z_;
  double jitter_ = 0.0;
  double max_qdiag_ = 0.0;
};

Prediction cokrige(const Dataset& data, const ModelSpec& spec,
                   const SpaceTimeLocation& target, int variable,
                   const PredictOptions& options = {});

/// Closed-form CRPS of a Gaussian predictive N(mu, sigma^2) against outcome
/// y: sigma [ z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi) ], z = (y - mu)/sigma.
/// Degenerates to |y - mu| at sigma = 0.
double gaussian_crps(double mu, double sigma, double y);

struct ScoreTable {
  Eigen::VectorXd mse;             // per variable
  Eigen::VectorXd crps;            // per variable
  std::vector<std::size_t> count;  // targets per variable
  std::optional<double> log_cl;    // carried from a FitResult when available
};

/// Drop-one cross-validation: every observation predicted from the
/// remaining ones; per-variable mean squared error and mean CRPS.
ScoreTable drop_one_cv(const Dataset& data, const ModelSpec& spec,
                       const PredictOptions& options = {});

}  // namespace sphcov
