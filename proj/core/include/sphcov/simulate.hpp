#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sphcov/geometry.hpp"
#include "sphcov/models.hpp"

namespace sphcov {

/// Flattened observation design: one row per (location, variable).
struct Design {
  std::vector<SpaceTimeLocation> locations;
  std::vector<int> variables;  // 0-based

  std::size_t size() const { return locations.size(); }
};

/// Full product design sites x times x {0..m-1}, row-major in that order.
Design product_design(std::span<const SpherePoint> sites,
                      std::span<const double> times, int m);

/// SplitMix64-derived substream seed for replication `stream`.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

/// Deterministic standard-normal stream: std::mt19937_64 (whose output
/// sequence is fixed by the standard) -> 53-bit uniforms -> Box-Muller.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed);
  double operator()();
  Eigen::VectorXd vector(Eigen::Index n);

 private:
  double uniform_open01();  // in (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct CholeskyResult {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  // total diagonal shift applied
};

/// Cholesky factorization with escalating diagonal jitter
/// delta * trace(M)/N for delta in {1e-12, 1e-10, 1e-8}. Throws
/// std::runtime_error (reporting the minimum eigenvalue) when the matrix
/// stays non-factorizable at the largest jitter.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& M);

struct Realization {
  std::shared_ptr<const Design> design;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;   // substream seed of this replication
  std::string model;        // provenance
};

struct SimulateOptions {
  double radius_km = kEarthRadiusKm;
  std::size_t max_size = 5000;
};

/// Exact dense simulation: z = L eps with L from the jittered Cholesky of
/// the assembled covariance and eps a seeded NormalSampler stream.
/// Replication r uses substream_seed(seed, r).
std::vector<Realization> simulate(const ModelSpec& spec, const Design& design,
                                  std::uint64_t seed, int n_reps,
                                  const SimulateOptions& options = {});

}  // namespace sphcov
