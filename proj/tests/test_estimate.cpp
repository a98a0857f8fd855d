#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sphcov/dataset.hpp"
#include "sphcov/estimate.hpp"
#include "sphcov/optim.hpp"
#include "sphcov/simulate.hpp"

using namespace sphcov;

namespace {

Dataset two_collocated() {
  std::vector<Observation> rows{{SpherePoint(10.0, 20.0), 0.0, 0, 0.3},
                                {SpherePoint(10.0, 20.0), 0.0, 1, -0.7}};
  return Dataset(std::move(rows));
}

Design region_design(std::uint64_t seed, int n_sites, int n_times) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SpherePoint> sites;
  const double sin_lo = std::sin(deg2rad(-50.0));
  for (int s = 0; s < n_sites; ++s) {
    const double lon = 50.0 + 100.0 * u(rng);
    const double lat = rad2deg(std::asin(sin_lo * (1.0 - u(rng))));
    sites.emplace_back(lon, lat);
  }
  std::vector<double> times(static_cast<std::size_t>(n_times));
  for (int t = 0; t < n_times; ++t) times[static_cast<std::size_t>(t)] = t;
  return product_design(sites, times, 2);
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("nelder-mead maximizes a quadratic") {
  const auto objective = [](const Eigen::VectorXd& x) {
    return -(x[0] - 1.5) * (x[0] - 1.5) - 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const SimplexResult result =
      nelder_mead_maximize(objective, Eigen::Vector2d(0.0, 0.0));
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(result.x[1] == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(result.value == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("build_pairs on collocated observations") {
  const Dataset data = two_collocated();
  const PairIndex pairs = build_pairs(data, 10.0, 1.0);
  CHECK(pairs.pairs.size() == 1);
  CHECK(pairs.pairs[0].theta_km == 0.0);
  CHECK(pairs.pairs[0].u == 0.0);
  CHECK(pairs.pairs[0].var_a != pairs.pairs[0].var_b);

  // degenerate cutoffs keep only exactly-collocated pairs
  std::vector<Observation> rows{{SpherePoint(0.0, 0.0), 0.0, 0, 1.0},
                                {SpherePoint(0.0, 0.0), 0.0, 1, 2.0},
                                {SpherePoint(20.0, 0.0), 0.0, 0, 3.0},
                                {SpherePoint(0.0, 0.0), 5.0, 0, 4.0}};
  const Dataset spread(std::move(rows));
  const PairIndex degenerate = build_pairs(spread, 1e-9, 0.0);
  CHECK(degenerate.pairs.size() == 1);

  CHECK_THROWS_WITH_AS(build_pairs(spread, 1e-12, 0.0),
                       doctest::Contains("increase the cutoffs"),
                       std::runtime_error);
}

TEST_CASE("build_pairs matches a brute-force recount") {
  const Design design = region_design(404, 40, 5);
  const ModelSpec truth(ModelA{2.0, 1.0, 0.3, 3000.0, 12.0});
  const auto reps = simulate(truth, design, 5150, 1);
  const Dataset data = dataset_from_realization(reps[0]);

  const double ds = 1275.6, dt = 4.0;
  const PairIndex pairs = build_pairs(data, ds, dt);

  std::size_t recount = 0;
  for (std::size_t a = 0; a < data.size(); ++a) {
    for (std::size_t b = a + 1; b < data.size(); ++b) {
      const double u = std::fabs(data.row(a).time - data.row(b).time);
      const double theta =
          geodesic_km(data.row(a).point, data.row(b).point, data.radius_km());
      if (u <= dt && theta <= ds) ++recount;
    }
  }
  CHECK(pairs.pairs.size() == recount);
  CHECK(recount > 0);

  // no self pairs, each unordered pair once
  for (const auto& p : pairs.pairs) CHECK(p.a < p.b);
}

TEST_CASE("cl_objective closed-form and additivity") {
  // single independent pair at (0, 0): 2 * (-1/2 log 2pi)
  std::vector<Observation> rows{{SpherePoint(0.0, 0.0), 0.0, 0, 0.0},
                                {SpherePoint(0.0, 0.0), 0.0, 1, 0.0}};
  const Dataset data(std::move(rows));
  const ModelSpec indep(ModelA{1.0, 1.0, 0.0, 1000.0, 10.0});
  const PairIndex pairs = build_pairs(data, 10.0, 1.0);
  const double value = cl_objective(data, indep, pairs);
  CHECK(value == doctest::Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-12));

  // additivity: duplicating the pair list doubles the objective
  PairIndex doubled = pairs;
  doubled.pairs.insert(doubled.pairs.end(), pairs.pairs.begin(),
                       pairs.pairs.end());
  CHECK(cl_objective(data, indep, doubled) ==
        doctest::Approx(2.0 * value).epsilon(1e-12));

  // a correlated model changes the density value
  const ModelSpec corr(ModelA{1.0, 1.0, 0.5, 1000.0, 10.0});
  const double with_corr = cl_objective(data, corr, pairs);
  const double expected =
      -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(1.0 - 0.25);
  CHECK(with_corr == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cl_objective is invariant to row permutations") {
  const Design design = region_design(7, 20, 3);
  const ModelSpec truth(ModelC{2.0, 1.0, 0.3, 2500.0, 1800.0, 15.0});
  const auto reps = simulate(truth, design, 111, 1);
  const Dataset data = dataset_from_realization(reps[0]);

  std::vector<Observation> shuffled = data.rows();
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Dataset permuted(std::move(shuffled));

  const double a =
      cl_objective(data, truth, build_pairs(data, 1275.6, 4.0));
  const double b =
      cl_objective(permuted, truth, build_pairs(permuted, 1275.6, 4.0));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("guard tallies numerically singular blocks") {
  std::vector<Observation> rows{{SpherePoint(0.0, 0.0), 0.0, 0, 0.4},
                                {SpherePoint(0.0, 0.0), 0.0, 1, 0.4}};
  const Dataset data(std::move(rows));
  // |rho| = 1 makes the collocated 2x2 block singular
  const ModelSpec degenerate(ModelA{1.0, 1.0, 1.0, 1000.0, 10.0});
  const PairIndex pairs = build_pairs(data, 10.0, 1.0);
  ClDiagnostics diag;
  const double value = cl_objective(data, degenerate, pairs, &diag);
  CHECK(diag.guarded_pairs == 1);
  CHECK(value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("objective prefers truth over badly scaled parameters") {
  int wins = 0;
  const int n_seeds = 10;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const Design design = region_design(1000 + seed, 60, 4);
    const ModelSpec truth(ModelC{2.0, 1.0, 0.3, 2500.0, 1800.0, 15.0});
    const auto reps = simulate(truth, design, 333 + seed, 1);
    const Dataset data = dataset_from_realization(reps[0]);
    const PairIndex pairs = build_pairs(data, 1275.6, 4.0);
    const ModelSpec perturbed(
        ModelC{2.0, 1.0, 0.3, 3.0 * 2500.0, 3.0 * 1800.0, 3.0 * 15.0});
    if (cl_objective(data, truth, pairs) >=
        cl_objective(data, perturbed, pairs)) {
      ++wins;
    }
  }
  CHECK(wins >= 9);
}

TEST_CASE("make_spec respects the model C structural constraint") {
  ParameterVector p = default_parameters(FittableFamily::ModelC);
  p.set("c11", 1200.0);
  p.set("c22", 3400.0);
  const ModelSpec spec = make_spec(FittableFamily::ModelC, p);
  const auto& c = std::get<ModelC>(spec.family());
  CHECK(c.c12() == 3400.0);
  CHECK(check_validity_constraint(spec).valid);
}

TEST_CASE("fit contract on a small synthetic dataset") {
  const Design design = region_design(55, 40, 4);
  const ModelSpec truth(ModelA{2.0, 1.0, 0.3, 3000.0, 12.0});
  const auto reps = simulate(truth, design, 777, 1);
  const Dataset data = dataset_from_realization(reps[0]);
  const PairCutoffs cutoffs{1275.6, 4.0};

  ParameterVector init =
      initial_parameters(FittableFamily::ModelA, data, cutoffs.ds_max_km,
                         cutoffs.dt_max);
  FitOptions options;
  options.restarts = 2;
  options.simplex.max_iterations = 600;
  const FitResult result =
      fit(data, FittableFamily::ModelA, init, cutoffs, options);

  // maximizer contract: never below the init objective
  const PairIndex pairs = build_pairs(data, cutoffs.ds_max_km, cutoffs.dt_max);
  const double at_init =
      cl_objective(data, make_spec(FittableFamily::ModelA, init), pairs);
  CHECK(result.log_cl >= at_init);

  // reported parameters reproduce the reported objective
  const double replayed = cl_objective(
      data, make_spec(FittableFamily::ModelA, result.parameters), pairs);
  CHECK(std::fabs(replayed - result.log_cl) <= 1e-9 * std::fabs(result.log_cl));

  CHECK(result.pair_count == pairs.pairs.size());
  CHECK(result.trace.size() == 2);

  // init at the reported optimum cannot decrease the objective
  const FitResult retry = fit(data, FittableFamily::ModelA, result.parameters,
                              cutoffs, options);
  CHECK(retry.log_cl >= result.log_cl - 1e-9 * std::fabs(result.log_cl));
}

TEST_CASE("fit rejects out-of-bounds inits") {
  const Dataset data = two_collocated();
  ParameterVector init = default_parameters(FittableFamily::ModelA);
  std::vector<Parameter> entries = init.entries();
  for (auto& p : entries) {
    if (p.name == "c_s") {
      p.lower = 10.0;
      p.upper = 100.0;
      p.value = 500.0;  // outside
    }
  }
  CHECK_THROWS_AS(fit(data, FittableFamily::ModelA, ParameterVector(entries),
                      PairCutoffs{10.0, 1.0}),
                  std::invalid_argument);
}

}  // TEST_SUITE
