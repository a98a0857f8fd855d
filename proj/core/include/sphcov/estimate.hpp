#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sphcov/dataset.hpp"
#include "sphcov/models.hpp"
#include "sphcov/optim.hpp"

namespace sphcov {

/// Model families supported by the composite-likelihood fitter (the
/// section-4 presets; raw building-block families are evaluate/validate
/// only).
enum class FittableFamily { ModelA, ModelB, ModelC, ModelD };

std::string to_string(FittableFamily f);
std::optional<FittableFamily> fittable_family_from_string(const std::string& s);

/// Named parameterization (values, transforms, bounds) for a fittable
/// family; values carry defaults that are overwritten by initialization.
ParameterVector default_parameters(FittableFamily family);

/// Data-driven initial values: empirical variances for the sills, the
/// collocated empirical correlation for rho12, and cutoff-scale values for
/// the range parameters.
ParameterVector initial_parameters(FittableFamily family, const Dataset& data,
                                   double ds_max_km, double dt_max);

/// Binds natural-space parameter values into a validated ModelSpec.
ModelSpec make_spec(FittableFamily family, const ParameterVector& params);

struct PairCutoffs {
  double ds_max_km = 0.0;
  double dt_max = 0.0;
};

struct ObservationPair {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double theta_km = 0.0;  // great-circle distance between the two rows
  double u = 0.0;         // time lag t_a - t_b
  std::int32_t var_a = 0;
  std::int32_t var_b = 0;
};

/// All unordered observation pairs within the spatial/temporal cutoffs
/// (cross-variable pairs included; no self pairs). Geometry is cached so
/// repeated objective evaluations only price the covariance model.
struct PairIndex {
  std::vector<ObservationPair> pairs;
  PairCutoffs cutoffs;
  std::size_t n_obs = 0;
};

/// Exhaustive O(N^2) scan; throws when no pair satisfies the cutoffs.
PairIndex build_pairs(const Dataset& data, double ds_max_km, double dt_max);

struct ClDiagnostics {
  std::size_t guarded_pairs = 0;  // non-PD 2x2 blocks hit the -inf guard
};

/// Pairwise composite log-likelihood: sum over pairs of the bivariate
/// zero-mean Gaussian log density with the model 2x2 covariance. Higher is
/// better. Pairs whose 2x2 block is numerically singular contribute a
/// large negative guard value and are tallied in the diagnostics.
double cl_objective(const Dataset& data, const ModelSpec& spec,
                    const PairIndex& pairs, ClDiagnostics* diagnostics = nullptr);

struct RestartTrace {
  Eigen::VectorXd init;       // natural space
  Eigen::VectorXd solution;   // natural space
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct FitResult {
  ParameterVector parameters;
  double log_cl = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<RestartTrace> trace;
  std::size_t pair_count = 0;
  std::size_t guarded_pairs = 0;
};

struct FitOptions {
  int restarts = 3;
  std::uint64_t seed = 20240812u;  // jittered restart inits
  double restart_jitter = 0.3;     // sd of the transformed-space jitter
  SimplexOptions simplex;
};

/// Maximizes the composite likelihood over transformed parameters with a
/// multi-restart Nelder-Mead search. The returned objective never falls
/// below the objective at `init`.
FitResult fit(const Dataset& data, FittableFamily family,
              const ParameterVector& init, const PairCutoffs& cutoffs,
              const FitOptions& options = {});

}  // namespace sphcov
