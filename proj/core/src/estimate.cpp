#include "sphcov/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sphcov/parallel.hpp"
#include "sphcov/simulate.hpp"

namespace sphcov {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

Parameter positive(const std::string& name, double value) {
  return {name, value, Transform::Log, 0.0,
          std::numeric_limits<double>::infinity()};
}

Parameter correlation(const std::string& name, double value) {
  return {name, value, Transform::Atanh, -1.0, 1.0};
}

Parameter unconstrained(const std::string& name, double value) {
  return {name, value, Transform::Identity,
          -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
}

}  // namespace

std::string to_string(FittableFamily f) {
  switch (f) {
    case FittableFamily::ModelA: return "model_a";
    case FittableFamily::ModelB: return "model_b";
    case FittableFamily::ModelC: return "model_c";
    case FittableFamily::ModelD: return "model_d";
  }
  return "?";
}

std::optional<FittableFamily> fittable_family_from_string(const std::string& s) {
  if (s == "model_a") return FittableFamily::ModelA;
  if (s == "model_b") return FittableFamily::ModelB;
  if (s == "model_c") return FittableFamily::ModelC;
  if (s == "model_d") return FittableFamily::ModelD;
  return std::nullopt;
}

ParameterVector default_parameters(FittableFamily family) {
  switch (family) {
    case FittableFamily::ModelA:
    case FittableFamily::ModelB:
      return ParameterVector({positive("var1", 1.0), positive("var2", 1.0),
                              correlation("rho12", 0.0),
                              positive("c_s", 1000.0), positive("c_t", 5.0)});
    case FittableFamily::ModelC:
      return ParameterVector({positive("var1", 1.0), positive("var2", 1.0),
                              correlation("rho12", 0.0),
                              positive("c11", 1000.0), positive("c22", 1000.0),
                              positive("c_t", 5.0)});
    case FittableFamily::ModelD:
      return ParameterVector(
          {positive("a11", 1.0), unconstrained("a21", 0.1),
           positive("a22", 1.0), positive("c_s1", 1000.0),
           positive("c_s2", 1000.0), positive("c_t1", 5.0),
           positive("c_t2", 5.0), positive("zeta12", 1.0)});
  }
  throw std::invalid_argument("default_parameters: unknown family");
}

ParameterVector initial_parameters(FittableFamily family, const Dataset& data,
                                   double ds_max_km, double dt_max) {
  if (data.num_variables() < 2) {
    throw std::invalid_argument(
        "initial_parameters: presets are bivariate, need m >= 2");
  }
  const Eigen::VectorXd var = data.empirical_variances();
  const double rho =
      std::clamp(data.empirical_cross_correlation(0, 1), -0.9, 0.9);
  const double c_spatial = std::max(ds_max_km, 1.0);
  const double c_temporal = std::max(dt_max, 1.0);
  const double v1 = std::max(var[0], 1e-12);
  const double v2 = std::max(var[1], 1e-12);

  ParameterVector p = default_parameters(family);
  switch (family) {
    case FittableFamily::ModelA:
    case FittableFamily::ModelB:
      p.set("var1", v1);
      p.set("var2", v2);
      p.set("rho12", rho);
      p.set("c_s", c_spatial);
      p.set("c_t", c_temporal);
      break;
    case FittableFamily::ModelC:
      p.set("var1", v1);
      p.set("var2", v2);
      p.set("rho12", rho);
      p.set("c11", c_spatial);
      p.set("c22", c_spatial);
      p.set("c_t", c_temporal);
      break;
    case FittableFamily::ModelD: {
      // C11(0,0) = a11^2, C22(0,0) = a21^2 + a22^2,
      // C12(0,0) = a11 a21 / sqrt(zeta12 + 1) with zeta12 = 1 initially.
      const double zeta = 1.0;
      const double a11 = std::sqrt(v1);
      double a21 = rho * std::sqrt(v2) * std::sqrt(zeta + 1.0);
      const double cap = 0.8 * std::sqrt(v2);
      a21 = std::clamp(a21, -cap, cap);
      const double a22 = std::sqrt(std::max(v2 - a21 * a21, 0.04 * v2));
      p.set("a11", a11);
      p.set("a21", a21 == 0.0 ? 0.01 * std::sqrt(v2) : a21);
      p.set("a22", a22);
      p.set("c_s1", c_spatial);
      p.set("c_s2", c_spatial);
      p.set("c_t1", c_temporal);
      p.set("c_t2", c_temporal);
      p.set("zeta12", zeta);
      break;
    }
  }
  return p;
}

ModelSpec make_spec(FittableFamily family, const ParameterVector& params) {
  switch (family) {
    case FittableFamily::ModelA:
      return ModelSpec(ModelA{params.value_of("var1"), params.value_of("var2"),
                              params.value_of("rho12"), params.value_of("c_s"),
                              params.value_of("c_t")});
    case FittableFamily::ModelB:
      return ModelSpec(ModelB{params.value_of("var1"), params.value_of("var2"),
                              params.value_of("rho12"), params.value_of("c_s"),
                              params.value_of("c_t")});
    case FittableFamily::ModelC:
      return ModelSpec(ModelC{params.value_of("var1"), params.value_of("var2"),
                              params.value_of("rho12"), params.value_of("c11"),
                              params.value_of("c22"), params.value_of("c_t")});
    case FittableFamily::ModelD:
      return ModelSpec(ModelD{params.value_of("a11"), params.value_of("a21"),
                              params.value_of("a22"), params.value_of("c_s1"),
                              params.value_of("c_s2"), params.value_of("c_t1"),
                              params.value_of("c_t2"),
                              params.value_of("zeta12")});
  }
  throw std::invalid_argument("make_spec: unknown family");
}

PairIndex build_pairs(const Dataset& data, double ds_max_km, double dt_max) {
  if (!(ds_max_km > 0.0) || !(dt_max >= 0.0)) {
    throw std::invalid_argument("build_pairs: require ds_max_km > 0, dt_max >= 0");
  }
  const auto& rows = data.rows();
  const std::size_t n = rows.size();

  const std::size_t chunks = chunk_count(n);
  std::vector<std::vector<ObservationPair>> partial(chunks);
  const std::size_t step = (n + chunks - 1) / chunks;
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    const std::size_t chunk = begin / step;
    auto& local = partial[chunk];
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double u = rows[a].time - rows[b].time;
        if (std::fabs(u) > dt_max) continue;
        const double theta =
            geodesic_km(rows[a].point, rows[b].point, data.radius_km());
        if (theta > ds_max_km) continue;
        local.push_back(ObservationPair{static_cast<std::uint32_t>(a),
                                        static_cast<std::uint32_t>(b), theta, u,
                                        rows[a].variable, rows[b].variable});
      }
    }
  });

  PairIndex index;
  index.cutoffs = {ds_max_km, dt_max};
  index.n_obs = n;
  std::size_t total = 0;
  for (const auto& part : partial) total += part.size();
  index.pairs.reserve(total);
  for (auto& part : partial) {
    index.pairs.insert(index.pairs.end(), part.begin(), part.end());
  }
  if (index.pairs.empty()) {
    throw std::runtime_error(
        "build_pairs: no observation pairs within cutoffs ds_max_km=" +
        std::to_string(ds_max_km) + ", dt_max=" + std::to_string(dt_max) +
        "; increase the cutoffs");
  }
  return index;
}

double cl_objective(const Dataset& data, const ModelSpec& spec,
                    const PairIndex& pairs, ClDiagnostics* diagnostics) {
  if (pairs.n_obs != data.size()) {
    throw std::invalid_argument("cl_objective: pair index built for another dataset");
  }
  const int m = spec.num_variables();
  if (data.num_variables() > m) {
    throw std::invalid_argument("cl_objective: dataset has more variables than model");
  }
  Eigen::VectorXd variance(m);
  for (int v = 0; v < m; ++v) variance[v] = spec.cov(v, v, 0.0, 0.0);

  const auto& rows = data.rows();
  const std::size_t n_pairs = pairs.pairs.size();
  const std::size_t chunks = chunk_count(n_pairs);
  std::vector<double> chunk_sum(chunks, 0.0);
  std::vector<std::size_t> chunk_guarded(chunks, 0);
  const std::size_t step = (n_pairs + chunks - 1) / chunks;

  parallel_chunks(n_pairs, [&](std::size_t begin, std::size_t end) {
    const std::size_t chunk = begin / step;
    double acc = 0.0;
    std::size_t guarded = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const ObservationPair& pr = pairs.pairs[k];
      const double caa = variance[pr.var_a];
      const double cbb = variance[pr.var_b];
      const double cab = spec.cov(pr.var_a, pr.var_b, pr.theta_km, pr.u);
      const double det = caa * cbb - cab * cab;
      if (!(det > 0.0) || !std::isfinite(det)) {
        ++guarded;
        acc = kNegInf;
        continue;
      }
      const double za = rows[pr.a].value;
      const double zb = rows[pr.b].value;
      const double quad = (cbb * za * za - 2.0 * cab * za * zb + caa * zb * zb) / det;
      acc += -kLog2Pi - 0.5 * std::log(det) - 0.5 * quad;
    }
    chunk_sum[chunk] = acc;
    chunk_guarded[chunk] = guarded;
  });

  double total = 0.0;
  std::size_t guarded = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += chunk_sum[c];
    guarded += chunk_guarded[c];
  }
  if (diagnostics) diagnostics->guarded_pairs = guarded;
  return total;
}

FitResult fit(const Dataset& data, FittableFamily family,
              const ParameterVector& init, const PairCutoffs& cutoffs,
              const FitOptions& options) {
  if (options.restarts < 1) {
    throw std::invalid_argument("fit: require restarts >= 1");
  }
  {
    // Init must be inside the feasible region.
    const Eigen::VectorXd v0 = init.values();
    if (!init.within_bounds(v0)) {
      throw std::invalid_argument("fit: initial values violate bounds");
    }
    make_spec(family, init);  // throws when structurally invalid
  }
  const PairIndex pairs = build_pairs(data, cutoffs.ds_max_km, cutoffs.dt_max);

  auto transformed_objective = [&](const Eigen::VectorXd& z) -> double {
    Eigen::VectorXd natural;
    try {
      natural = init.natural_from_transformed(z);
    } catch (const std::exception&) {
      return kNegInf;
    }
    if (!init.within_bounds(natural)) return kNegInf;
    if (!natural.allFinite()) return kNegInf;
    try {
      const ModelSpec spec = make_spec(family, init.with_values(natural));
      return cl_objective(data, spec, pairs);
    } catch (const std::exception&) {
      return kNegInf;
    }
  };

  const Eigen::VectorXd z0 = init.transformed();

  FitResult result;
  result.pair_count = pairs.pairs.size();
  double best_value = kNegInf;
  Eigen::VectorXd best_z = z0;
  bool best_converged = false;
  int total_iterations = 0;

  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd start = z0;
    if (r > 0) {
      NormalSampler jitter(substream_seed(options.seed, static_cast<std::uint64_t>(r)));
      for (Eigen::Index k = 0; k < start.size(); ++k) {
        start[k] += options.restart_jitter * jitter();
      }
      if (!std::isfinite(transformed_objective(start))) start = z0;
    }
    const SimplexResult run =
        nelder_mead_maximize(transformed_objective, start, options.simplex);
    total_iterations += run.iterations;

    RestartTrace trace;
    trace.init = init.natural_from_transformed(start);
    trace.solution = init.natural_from_transformed(run.x);
    trace.objective = run.value;
    trace.iterations = run.iterations;
    trace.converged = run.converged;
    result.trace.push_back(std::move(trace));

    if (run.value > best_value) {
      best_value = run.value;
      best_z = run.x;
      best_converged = run.converged;
    }
  }

  const Eigen::VectorXd best_natural = init.natural_from_transformed(best_z);
  result.parameters = init.with_values(best_natural);
  result.log_cl = best_value;
  result.iterations = total_iterations;
  result.converged = best_converged && std::isfinite(best_value);

  ClDiagnostics diag;
  cl_objective(data, make_spec(family, result.parameters), pairs, &diag);
  result.guarded_pairs = diag.guarded_pairs;
  return result;
}

}  // namespace sphcov
