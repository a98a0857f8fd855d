#include "sphcov/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sphcov {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SimplexResult nelder_mead_maximize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const SimplexOptions& options) {
  const auto dim = x0.size();
  if (dim < 1) throw std::invalid_argument("nelder_mead: empty start point");

  int evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : kNegInf;
  };

  std::vector<Eigen::VectorXd> vertex(static_cast<std::size_t>(dim) + 1, x0);
  std::vector<double> value(static_cast<std::size_t>(dim) + 1);
  for (Eigen::Index k = 0; k < dim; ++k) {
    vertex[static_cast<std::size_t>(k) + 1][k] += options.initial_step;
  }
  for (std::size_t k = 0; k < vertex.size(); ++k) value[k] = eval(vertex[k]);

  std::vector<std::size_t> order(vertex.size());
  auto sort_desc = [&] {
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
  };

  SimplexResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sort_desc();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    const double spread = value[best] - value[worst];
    if (std::isfinite(value[best]) && spread < options.spread_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (const std::size_t k : order) {
      if (k == worst) continue;
      centroid += vertex[k];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected =
        centroid + options.reflection * (centroid - vertex[worst]);
    const double f_reflected = eval(reflected);

    if (f_reflected > value[best]) {
      const Eigen::VectorXd expanded =
          centroid + options.expansion * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded > f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected > value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }

    // Contraction, outside or inside of the worst vertex.
    const bool outside = f_reflected > value[worst];
    Eigen::VectorXd contracted;
    if (outside) {
      contracted = centroid + options.contraction * (reflected - centroid);
    } else {
      contracted = centroid - options.contraction * (centroid - vertex[worst]);
    }
    const double f_contracted = eval(contracted);
    if (f_contracted > (outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }

    // Shrink toward the best vertex.
    for (const std::size_t k : order) {
      if (k == order.front()) continue;
      vertex[k] = vertex[best] + options.shrink * (vertex[k] - vertex[best]);
      value[k] = eval(vertex[k]);
    }
  }

  sort_desc();
  result.x = vertex[order.front()];
  result.value = value[order.front()];
  result.iterations = iter;
  result.evaluations = evaluations;
  return result;
}

}  // namespace sphcov
