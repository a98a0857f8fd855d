#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace sphcov {

struct SchoenbergOptions {
  int max_order = 50;        // coefficients reported for n = 0..max_order
  int nodes = 512;           // Gauss-Legendre nodes on [0, pi]
  double quadrature_tol = 1e-8;   // node-doubling agreement threshold
  double tail_warn = 1e-4;        // tail-mass warning threshold
  double coefficient_tol = 1e-6;  // negativity threshold for support verdicts
};

/// Numerical evidence from a truncated Schoenberg expansion on S^d (or
/// S^d x R when lag-resolved). Finite truncation can refute validity or
/// support it; it cannot prove it.
struct SchoenbergReport {
  int d = 0;
  int m = 1;
  int max_order = 0;
  int nodes = 0;

  /// B_{n,d} for n = 0..max_order; in lag-resolved mode this is the u = 0
  /// slice of the coefficient functions.
  std::vector<Eigen::MatrixXd> coefficients;

  /// Lag-resolved mode only: lag_coefficients[n][l] is the m x m matrix
  /// phi_{n,d}(lags[l]).
  Eigen::VectorXd lags;
  std::vector<std::vector<Eigen::MatrixXd>> lag_coefficients;

  double min_diagonal = 0.0;    // min over n of diag(B_{n,d})
  double min_eigenvalue = 0.0;  // min over n of lambda_min(B_{n,d})
  Eigen::MatrixXd tail_mass;    // |psi(0) - sum_n B_{n,d}|, entrywise
  double max_tail_mass = 0.0;
  bool tail_warning = false;

  bool quadrature_converged = true;
  double quadrature_disagreement = 0.0;

  /// Lag-resolved mode: minimum eigenvalue over n of the (block) Toeplitz
  /// matrices [phi_{n,d}(|u_k - u_l|)]_{kl} on the lag grid.
  double min_temporal_eigenvalue = 0.0;
  bool temporal_psd = true;

  /// True when no coefficient evidence falls below -tol (diagonals and
  /// matrix eigenvalues; plus temporal slices in lag-resolved mode).
  bool supported(double tol = 1e-6) const;
};

using MatrixFunction = std::function<Eigen::MatrixXd(double)>;
using SpaceTimeMatrixFunction = std::function<Eigen::MatrixXd(double, double)>;

/// Schoenberg matrices B_{n,d} of a geodesically isotropic m x m function
/// psi on [0, pi]:
///   d = 1:  B_0 = (1/pi) int psi,  B_n = (2/pi) int cos(n theta) psi
///   d >= 2: B_n = (2n+d-1)/(2^{3-d} pi) Gamma((d-1)/2)^2 / Gamma(d-1)
///                 int G_n^{(d-1)/2}(cos theta) (sin theta)^{d-1} psi
/// Integrals use Gauss-Legendre with options.nodes points; a second pass at
/// twice the nodes flags nonconvergence instead of failing silently.
SchoenbergReport schoenberg_matrices(const MatrixFunction& psi, int m, int d,
                                     const SchoenbergOptions& options = {});

/// Lag-resolved Schoenberg coefficient functions phi_{n,d}(u) of a
/// space-time covariance on [0, pi] x lag grid. The grid must be uniform
/// and start at 0 so each n-slice yields a (block) Toeplitz temporal matrix
/// whose eigenvalues provide the temporal positive-definiteness evidence.
SchoenbergReport schoenberg_functions(const SpaceTimeMatrixFunction& cov, int m,
                                      int d, const Eigen::VectorXd& lags,
                                      const SchoenbergOptions& options = {});

struct EigenCheck {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool psd = false;
};

/// Symmetric eigenvalue check: psd iff lambda_min >= -tol * max(lambda_max, 0).
/// Throws when the input is asymmetric beyond 1e-10.
EigenCheck min_eigen_check(const Eigen::MatrixXd& M, double tol = 1e-8);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Uniform lag grid {0, step, ..., (count-1) step}.
Eigen::VectorXd uniform_lags(int count, double step);

}  // namespace sphcov
