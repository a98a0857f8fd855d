#include "sphcov/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphcov {

Design product_design(std::span<const SpherePoint> sites,
                      std::span<const double> times, int m) {
  if (m < 1) throw std::invalid_argument("product_design: require m >= 1");
  Design d;
  d.locations.reserve(sites.size() * times.size() * static_cast<std::size_t>(m));
  d.variables.reserve(d.locations.capacity());
  for (const auto& site : sites) {
    for (const double t : times) {
      for (int v = 0; v < m; ++v) {
        d.locations.emplace_back(site, t);
        d.variables.push_back(v);
      }
    }
  }
  return d;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  // SplitMix64 finalizer over master + stream increment.
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NormalSampler::NormalSampler(std::uint64_t seed) : engine_(seed) {}

double NormalSampler::uniform_open01() {
  // 53-bit mantissa; map [0, 1) to (0, 1] so log() below stays finite.
  const double u =
      static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

double NormalSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open01();
  const double u2 = uniform_open01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Eigen::VectorXd NormalSampler::vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (*this)();
  return v;
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("cholesky_with_jitter: matrix must be square");
  }
  const auto n = M.rows();
  const double scale = M.trace() / static_cast<double>(n);

  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() == Eigen::Success) {
    return {Eigen::MatrixXd(llt.matrixL()), 0.0};
  }
  for (const double delta : {1e-12, 1e-10, 1e-8}) {
    const double jitter = delta * scale;
    Eigen::MatrixXd shifted = M;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                    Eigen::EigenvaluesOnly);
  throw std::runtime_error(
      "cholesky_with_jitter: factorization failed at maximum jitter; "
      "min eigenvalue = " +
      std::to_string(es.eigenvalues().minCoeff()));
}

std::vector<Realization> simulate(const ModelSpec& spec, const Design& design,
                                  std::uint64_t seed, int n_reps,
                                  const SimulateOptions& options) {
  if (n_reps < 1) throw std::invalid_argument("simulate: require n_reps >= 1");
  if (design.size() == 0) throw std::invalid_argument("simulate: empty design");

  AssemblyOptions assembly;
  assembly.radius_km = options.radius_km;
  assembly.max_size = options.max_size;
  const CovarianceMatrix cov =
      assemble_covariance(design.locations, design.variables, spec, assembly);

  CholeskyResult chol;
  try {
    chol = cholesky_with_jitter(cov.values);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("simulate: model " + spec.family_name() + ": " +
                             e.what());
  }

  auto shared_design = std::make_shared<const Design>(design);
  const auto n = static_cast<Eigen::Index>(design.size());
  std::vector<Realization> reps;
  reps.reserve(static_cast<std::size_t>(n_reps));
  for (int r = 0; r < n_reps; ++r) {
    const std::uint64_t rep_seed = substream_seed(seed, static_cast<std::uint64_t>(r));
    NormalSampler normal(rep_seed);
    Realization real;
    real.design = shared_design;
    real.values = chol.lower * normal.vector(n);
    real.seed = rep_seed;
    real.model = spec.family_name();
    reps.push_back(std::move(real));
  }
  return reps;
}

}  // namespace sphcov
