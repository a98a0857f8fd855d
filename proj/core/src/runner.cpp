#include "sphcov/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "sphcov/dataset.hpp"
#include "sphcov/estimate.hpp"
#include "sphcov/parallel.hpp"
#include "sphcov/predict.hpp"
#include "sphcov/simulate.hpp"
#include "sphcov/validity.hpp"
#include "sphcov/version.hpp"

namespace sphcov {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunContext {
  RunConfig config;
  std::string subcommand;
  fs::path out_dir;
  std::uint64_t seed = 1;

  fs::path artifact(const std::string& name) const {
    const std::string prefix = config.output.prefix.empty()
                                   ? std::string()
                                   : config.output.prefix + "_";
    return out_dir / (prefix + name);
  }

  std::vector<std::string> provenance_lines() const {
    return {std::string("sphcov ") + kVersion,
            "subcommand=" + subcommand + " config_hash=" + config.config_hash +
                " seed=" + std::to_string(seed)};
  }

  json provenance_json() const {
    return json{{"version", kVersion},
                {"subcommand", subcommand},
                {"config_hash", config.config_hash},
                {"seed", seed}};
  }

  void write_json(const std::string& name, json payload) const {
    payload["provenance"] = provenance_json();
    std::ofstream out(artifact(name));
    if (!out) {
      throw std::runtime_error("cannot write " + artifact(name).string());
    }
    out << payload.dump(2) << "\n";
  }

  std::ofstream open_csv(const std::string& name) const {
    std::ofstream out(artifact(name));
    if (!out) {
      throw std::runtime_error("cannot write " + artifact(name).string());
    }
    for (const auto& line : provenance_lines()) out << "# " << line << "\n";
    return out;
  }
};

ModelSpec require_model(const RunContext& ctx) {
  if (!ctx.config.model) {
    throw std::invalid_argument(
        "this subcommand needs a fully parameterized 'model' block");
  }
  return ModelSpec(*ctx.config.model);
}

Dataset require_dataset(const RunContext& ctx) {
  if (!ctx.config.dataset) {
    throw std::invalid_argument("this subcommand needs a 'dataset' block");
  }
  DatasetOptions options;
  options.demean = ctx.config.dataset->demean;
  options.radius_km = ctx.config.dataset->radius_km;
  return Dataset::load_csv(ctx.config.dataset->path, options);
}

json parameter_json(const ParameterVector& params) {
  json out = json::object();
  for (const auto& p : params.entries()) out[p.name] = p.value;
  return out;
}

// --- validate ---------------------------------------------------------------

int run_validate(const RunContext& ctx) {
  json report;
  report["family"] = ctx.config.model_family;
  if (!ctx.config.model) {
    throw std::invalid_argument("validate needs model.parameters");
  }
  const auto margin = askey_check(*ctx.config.model);
  if (margin) {
    report["askey_margin"] = margin->margin;
    report["askey_valid"] = margin->valid;
  }
  try {
    const ModelSpec spec(*ctx.config.model);
    report["valid"] = true;
    report["num_variables"] = spec.num_variables();
  } catch (const std::exception& e) {
    report["valid"] = false;
    report["message"] = e.what();
  }
  ctx.write_json("validate.json", report);
  return 0;
}

// --- schoenberg --------------------------------------------------------------

int run_schoenberg(const RunContext& ctx) {
  const ModelSpec spec = require_model(ctx);
  const auto& sc = ctx.config.schoenberg;
  const int m = spec.num_variables();
  const double radius = sc.radius_km;

  SchoenbergOptions options;
  options.max_order = sc.max_order;
  options.nodes = sc.nodes;

  SchoenbergReport report;
  if (sc.mode == "matrices") {
    const MatrixFunction psi = [&spec, m, radius](double theta_rad) {
      Eigen::MatrixXd v(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          v(i, j) = spec.cov(i, j, theta_rad * radius, 0.0);
        }
      }
      return v;
    };
    report = schoenberg_matrices(psi, m, sc.d, options);
  } else {
    const SpaceTimeMatrixFunction cov = [&spec, m, radius](double theta_rad,
                                                           double u) {
      Eigen::MatrixXd v(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          v(i, j) = spec.cov(i, j, theta_rad * radius, u);
        }
      }
      return v;
    };
    report = schoenberg_functions(cov, m, sc.d,
                                  uniform_lags(sc.lag_count, sc.lag_step),
                                  options);
  }

  auto csv = ctx.open_csv("schoenberg.csv");
  if (report.lag_coefficients.empty()) {
    csv << "n,i,j,value\n";
    for (int n = 0; n <= report.max_order; ++n) {
      const auto& B = report.coefficients[static_cast<std::size_t>(n)];
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          csv << n << ',' << (i + 1) << ',' << (j + 1) << ','
              << fmt17(B(i, j)) << "\n";
        }
      }
    }
  } else {
    csv << "n,i,j,u,value\n";
    for (int n = 0; n <= report.max_order; ++n) {
      const auto& series = report.lag_coefficients[static_cast<std::size_t>(n)];
      for (Eigen::Index l = 0; l < report.lags.size(); ++l) {
        const auto& B = series[static_cast<std::size_t>(l)];
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            csv << n << ',' << (i + 1) << ',' << (j + 1) << ','
                << fmt17(report.lags[l]) << ',' << fmt17(B(i, j)) << "\n";
          }
        }
      }
    }
  }

  json summary{{"d", report.d},
               {"m", report.m},
               {"mode", sc.mode},
               {"max_order", report.max_order},
               {"nodes", report.nodes},
               {"min_diagonal", report.min_diagonal},
               {"min_eigenvalue", report.min_eigenvalue},
               {"max_tail_mass", report.max_tail_mass},
               {"tail_warning", report.tail_warning},
               {"quadrature_converged", report.quadrature_converged},
               {"quadrature_disagreement", report.quadrature_disagreement},
               {"supported", report.supported()}};
  if (!report.lag_coefficients.empty()) {
    summary["min_temporal_eigenvalue"] = report.min_temporal_eigenvalue;
    summary["temporal_psd"] = report.temporal_psd;
  }
  summary["note"] =
      "finite truncation provides evidence, not proof: a negative "
      "coefficient refutes validity; nonnegative coefficients support it";
  ctx.write_json("schoenberg.json", summary);
  return 0;
}

// --- simulate ---------------------------------------------------------------

std::vector<std::pair<SpaceTimeLocation, int>> load_targets(
    const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open targets " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header != "lon,lat,time,var") {
    throw std::runtime_error("targets: expected header 'lon,lat,time,var'");
  }
  std::vector<std::pair<SpaceTimeLocation, int>> targets;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    double lon, lat, t;
    int var;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &lon, &lat, &t, &var) != 4) {
      throw std::runtime_error("targets: line " + std::to_string(line_no) +
                               ": expected lon,lat,time,var");
    }
    if (var < 1) {
      throw std::runtime_error("targets: line " + std::to_string(line_no) +
                               ": var must be >= 1");
    }
    targets.emplace_back(SpaceTimeLocation(SpherePoint(lon, lat), t), var - 1);
  }
  if (targets.empty()) throw std::runtime_error("targets: no rows");
  return targets;
}

Design design_from_config(const RunContext& ctx, int m) {
  const auto& sim = ctx.config.simulate;
  if (!sim.design_path.empty()) {
    Design d;
    for (const auto& [loc, var] : load_targets(sim.design_path)) {
      d.locations.push_back(loc);
      d.variables.push_back(var);
    }
    return d;
  }
  if (sim.times.empty()) {
    throw std::invalid_argument("simulate.times must not be empty");
  }
  // Area-uniform sites on the configured lon/lat window, derived
  // deterministically from the run seed.
  std::mt19937_64 engine(substream_seed(ctx.seed, 0x73697465ULL));  // "site"
  auto uniform01 = [&engine] {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  };
  const double lon_lo = sim.lon_range[0];
  const double lon_hi = sim.lon_range[1];
  const double sin_lo = std::sin(deg2rad(sim.lat_range[0]));
  const double sin_hi = std::sin(deg2rad(sim.lat_range[1]));
  std::vector<SpherePoint> sites;
  sites.reserve(static_cast<std::size_t>(sim.n_sites));
  for (int s = 0; s < sim.n_sites; ++s) {
    const double lon = lon_lo + (lon_hi - lon_lo) * uniform01();
    const double sin_lat = sin_lo + (sin_hi - sin_lo) * uniform01();
    const double lat = rad2deg(std::asin(std::clamp(sin_lat, -1.0, 1.0)));
    sites.emplace_back(lon, lat);
  }
  return product_design(sites, sim.times, m);
}

int run_simulate(const RunContext& ctx) {
  const ModelSpec spec = require_model(ctx);
  const Design design = design_from_config(ctx, spec.num_variables());

  SimulateOptions options;
  if (ctx.config.dataset) options.radius_km = ctx.config.dataset->radius_km;
  const auto reps =
      simulate(spec, design, ctx.seed, ctx.config.simulate.n_reps, options);

  auto csv = ctx.open_csv("realizations.csv");
  csv << "rep,lon,lat,time,var,value\n";
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& real = reps[r];
    for (std::size_t k = 0; k < design.size(); ++k) {
      csv << (r + 1) << ',' << fmt17(design.locations[k].point.lon()) << ','
          << fmt17(design.locations[k].point.lat()) << ','
          << fmt17(design.locations[k].time) << ','
          << (design.variables[k] + 1) << ','
          << fmt17(real.values[static_cast<Eigen::Index>(k)]) << "\n";
    }
  }
  return 0;
}

// --- fit ---------------------------------------------------------------------

FitOptions fit_options_from_config(const RunContext& ctx) {
  FitOptions options;
  options.restarts = ctx.config.fit.restarts;
  options.simplex.max_iterations = ctx.config.fit.max_iterations;
  options.simplex.spread_tol = ctx.config.fit.spread_tol;
  options.seed = ctx.seed;
  return options;
}

int run_fit(const RunContext& ctx) {
  const auto family = fittable_family_from_string(ctx.config.model_family);
  if (!family) {
    throw std::invalid_argument(
        "fit supports the model_a/model_b/model_c/model_d presets; got '" +
        ctx.config.model_family + "'");
  }
  const Dataset data = require_dataset(ctx);
  const auto& cut = ctx.config.cutoffs;

  ParameterVector init =
      initial_parameters(*family, data, cut.ds_max_km, cut.dt_max);
  for (const auto& [name, value] : ctx.config.fit.init) {
    if (init.index_of(name) < 0) {
      throw std::invalid_argument("fit.init: unknown parameter '" + name + "'");
    }
    init.set(name, value);
  }
  if (!ctx.config.fit.bounds.empty()) {
    std::vector<Parameter> entries = init.entries();
    for (auto& p : entries) {
      const auto it = ctx.config.fit.bounds.find(p.name);
      if (it != ctx.config.fit.bounds.end()) {
        p.lower = it->second[0];
        p.upper = it->second[1];
      }
    }
    init = ParameterVector(entries);
  }

  const FitResult result = fit(data, *family, init,
                               PairCutoffs{cut.ds_max_km, cut.dt_max},
                               fit_options_from_config(ctx));

  json trace = json::array();
  for (const auto& t : result.trace) {
    json entry;
    entry["objective"] = t.objective;
    entry["iterations"] = t.iterations;
    entry["converged"] = t.converged;
    json init_j = json::array(), sol_j = json::array();
    for (Eigen::Index k = 0; k < t.init.size(); ++k) {
      init_j.push_back(t.init[k]);
      sol_j.push_back(t.solution[k]);
    }
    entry["init"] = init_j;
    entry["solution"] = sol_j;
    trace.push_back(entry);
  }
  ctx.write_json("fit.json",
                 json{{"family", to_string(*family)},
                      {"parameters", parameter_json(result.parameters)},
                      {"log_cl", result.log_cl},
                      {"iterations", result.iterations},
                      {"converged", result.converged},
                      {"pair_count", result.pair_count},
                      {"guarded_pairs", result.guarded_pairs},
                      {"cutoffs",
                       json{{"ds_max_km", cut.ds_max_km},
                            {"dt_max", cut.dt_max}}},
                      {"trace", trace}});
  return 0;
}

// --- cv / predict ------------------------------------------------------------

int run_cv(const RunContext& ctx) {
  const ModelSpec spec = require_model(ctx);
  const Dataset data = require_dataset(ctx);

  ScoreTable table = drop_one_cv(data, spec);
  // Log-CL of the supplied parameters at the configured cutoffs, the same
  // number a FitResult would carry for them.
  const PairIndex pairs =
      build_pairs(data, ctx.config.cutoffs.ds_max_km, ctx.config.cutoffs.dt_max);
  table.log_cl = cl_objective(data, spec, pairs);

  auto csv = ctx.open_csv("scores.csv");
  csv << "variable,mse,crps,count\n";
  for (int v = 0; v < data.num_variables(); ++v) {
    csv << (v + 1) << ',' << fmt17(table.mse[v]) << ',' << fmt17(table.crps[v])
        << ',' << table.count[static_cast<std::size_t>(v)] << "\n";
  }

  json summary{{"model", spec.family_name()}, {"log_cl", *table.log_cl}};
  json mse = json::array(), crps = json::array(), count = json::array();
  for (int v = 0; v < data.num_variables(); ++v) {
    mse.push_back(table.mse[v]);
    crps.push_back(table.crps[v]);
    count.push_back(table.count[static_cast<std::size_t>(v)]);
  }
  summary["mse"] = mse;
  summary["crps"] = crps;
  summary["count"] = count;
  ctx.write_json("scores.json", summary);
  return 0;
}

int run_predict(const RunContext& ctx) {
  const ModelSpec spec = require_model(ctx);
  const Dataset data = require_dataset(ctx);
  if (ctx.config.predict.targets_path.empty()) {
    throw std::invalid_argument("predict needs predict.targets_path");
  }
  const auto targets = load_targets(ctx.config.predict.targets_path);

  const CokrigeSolver solver(data, spec);
  auto csv = ctx.open_csv("predictions.csv");
  csv << "lon,lat,time,var,mean,variance\n";
  for (const auto& [loc, var] : targets) {
    const Prediction p = solver.predict(loc, var);
    csv << fmt17(loc.point.lon()) << ',' << fmt17(loc.point.lat()) << ','
        << fmt17(loc.time) << ',' << (var + 1) << ',' << fmt17(p.mean) << ','
        << fmt17(p.variance) << "\n";
  }
  return 0;
}

}  // namespace

bool is_known_subcommand(const std::string& subcommand) {
  return subcommand == "validate" || subcommand == "schoenberg" ||
         subcommand == "simulate" || subcommand == "fit" ||
         subcommand == "cv" || subcommand == "predict";
}

int run_subcommand(const std::string& subcommand, RunConfig config,
                   const RunOverrides& overrides) {
  if (!is_known_subcommand(subcommand)) return 2;

  RunContext ctx;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.out_dir) config.output.dir = *overrides.out_dir;
  ctx.seed = config.seed;
  ctx.subcommand = subcommand;
  ctx.out_dir = config.output.dir;
  ctx.config = std::move(config);

  set_max_threads(ctx.config.threads);
  fs::create_directories(ctx.out_dir);
  ctx.write_json("provenance.json", json::object());

  if (subcommand == "validate") return run_validate(ctx);
  if (subcommand == "schoenberg") return run_schoenberg(ctx);
  if (subcommand == "simulate") return run_simulate(ctx);
  if (subcommand == "fit") return run_fit(ctx);
  if (subcommand == "cv") return run_cv(ctx);
  return run_predict(ctx);
}

}  // namespace sphcov
