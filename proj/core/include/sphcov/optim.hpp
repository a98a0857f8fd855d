#pragma once

#include <Eigen/Core>
#include <functional>

namespace sphcov {

struct SimplexOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_iterations = 2000;
  double spread_tol = 1e-8;  // stop when max-min objective over vertices drops below
  double initial_step = 0.5;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex ascent of an unconstrained objective. The initial
/// simplex is x0 plus initial_step along each coordinate. Non-finite
/// objective values are treated as -inf, so callers can fence invalid
/// regions by returning -inf.
SimplexResult nelder_mead_maximize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const SimplexOptions& options = {});

}  // namespace sphcov
