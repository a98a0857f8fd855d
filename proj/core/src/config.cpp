#include "sphcov/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sphcov {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      fail("unknown key '" + key + "' in " + where);
    }
  }
}

double need_number(const json& obj, const std::string& where,
                   const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    fail("missing numeric '" + key + "' in " + where);
  }
  return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail("'" + key + "' must be numeric");
  return obj[key].get<double>();
}

CompletelyMonotoneSpec parse_cm(const json& g, const std::string& where) {
  if (!g.is_object() || !g.contains("family")) {
    fail(where + ": expected {family, ...} for g");
  }
  const std::string fam = g["family"].get<std::string>();
  if (fam == "pow_exp") {
    check_keys(g, where, {"family", "c", "gamma"});
    return CompletelyMonotoneSpec::pow_exp(need_number(g, where, "c"),
                                           need_number(g, where, "gamma"));
  }
  if (fam == "matern") {
    check_keys(g, where, {"family", "c", "nu"});
    return CompletelyMonotoneSpec::matern(need_number(g, where, "c"),
                                          need_number(g, where, "nu"));
  }
  if (fam == "gen_cauchy") {
    check_keys(g, where, {"family", "c", "gamma", "nu"});
    return CompletelyMonotoneSpec::gen_cauchy(need_number(g, where, "c"),
                                              need_number(g, where, "gamma"),
                                              need_number(g, where, "nu"));
  }
  if (fam == "hyperbolic_secant_pow") {
    check_keys(g, where, {"family", "c", "nu"});
    return CompletelyMonotoneSpec::hyperbolic_secant_pow(
        need_number(g, where, "c"), need_number(g, where, "nu"));
  }
  fail(where + ": unknown completely monotone family '" + fam + "'");
}

BernsteinSpec parse_bernstein(const json& f, const std::string& where) {
  if (!f.is_object() || !f.contains("family")) {
    fail(where + ": expected {family, ...} for f");
  }
  const std::string fam = f["family"].get<std::string>();
  if (fam == "power_plus_one") {
    check_keys(f, where, {"family", "a", "alpha", "beta"});
    return BernsteinSpec::power_plus_one(need_number(f, where, "a"),
                                         need_number(f, where, "alpha"),
                                         need_number(f, where, "beta"));
  }
  if (fam == "log_form") {
    check_keys(f, where, {"family", "a", "alpha", "b"});
    return BernsteinSpec::log_form(need_number(f, where, "a"),
                                   need_number(f, where, "alpha"),
                                   need_number(f, where, "b"));
  }
  if (fam == "rational_form") {
    check_keys(f, where, {"family", "a", "alpha", "b"});
    return BernsteinSpec::rational_form(need_number(f, where, "a"),
                                        need_number(f, where, "alpha"),
                                        need_number(f, where, "b"));
  }
  fail(where + ": unknown Bernstein family '" + fam + "'");
}

Eigen::VectorXd parse_vector(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) fail(where + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number()) fail(where + ": expected numbers");
    v[static_cast<Eigen::Index>(k)] = arr[k].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) fail(where + ": expected array of rows");
  const std::size_t rows = arr.size();
  const std::size_t cols = arr[0].is_array() ? arr[0].size() : 0;
  if (cols == 0) fail(where + ": expected array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!arr[i].is_array() || arr[i].size() != cols) {
      fail(where + ": ragged matrix");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!arr[i][j].is_number()) fail(where + ": expected numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          arr[i][j].get<double>();
    }
  }
  return m;
}

ModelSpec::Family parse_family(const std::string& family, const json& p) {
  const std::string where = "model.parameters (" + family + ")";
  if (family == "model_a") {
    check_keys(p, where, {"var1", "var2", "rho12", "c_s", "c_t"});
    return ModelA{need_number(p, where, "var1"), need_number(p, where, "var2"),
                  need_number(p, where, "rho12"), need_number(p, where, "c_s"),
                  need_number(p, where, "c_t")};
  }
  if (family == "model_b") {
    check_keys(p, where, {"var1", "var2", "rho12", "c_s", "c_t"});
    return ModelB{need_number(p, where, "var1"), need_number(p, where, "var2"),
                  need_number(p, where, "rho12"), need_number(p, where, "c_s"),
                  need_number(p, where, "c_t")};
  }
  if (family == "model_c") {
    check_keys(p, where, {"var1", "var2", "rho12", "c11", "c22", "c_t"});
    return ModelC{need_number(p, where, "var1"), need_number(p, where, "var2"),
                  need_number(p, where, "rho12"), need_number(p, where, "c11"),
                  need_number(p, where, "c22"), need_number(p, where, "c_t")};
  }
  if (family == "model_d") {
    check_keys(p, where, {"a11", "a21", "a22", "c_s1", "c_s2", "c_t1", "c_t2",
                          "zeta12"});
    return ModelD{need_number(p, where, "a11"),  need_number(p, where, "a21"),
                  need_number(p, where, "a22"),  need_number(p, where, "c_s1"),
                  need_number(p, where, "c_s2"), need_number(p, where, "c_t1"),
                  need_number(p, where, "c_t2"),
                  need_number(p, where, "zeta12")};
  }
  if (family == "gneiting_univariate") {
    check_keys(p, where, {"g", "f"});
    return GneitingUnivariate{parse_cm(p.value("g", json()), where),
                              parse_bernstein(p.value("f", json()), where)};
  }
  if (family == "modified_gneiting_uni") {
    check_keys(p, where, {"n", "g", "f"});
    return ModifiedGneitingUni{static_cast<int>(need_number(p, where, "n")),
                               parse_cm(p.value("g", json()), where),
                               parse_bernstein(p.value("f", json()), where)};
  }
  if (family == "modified_gneiting_multi") {
    check_keys(p, where, {"n", "g", "f", "sigma", "rho", "scale"});
    if (!p.contains("sigma") || !p.contains("rho") || !p.contains("scale")) {
      fail(where + ": need sigma, rho, scale");
    }
    return ModifiedGneitingMulti{static_cast<int>(need_number(p, where, "n")),
                                 parse_cm(p.value("g", json()), where),
                                 parse_bernstein(p.value("f", json()), where),
                                 parse_vector(p["sigma"], where + ".sigma"),
                                 parse_matrix(p["rho"], where + ".rho"),
                                 parse_matrix(p["scale"], where + ".scale")};
  }
  if (family == "latent_kernel") {
    check_keys(p, where, {"g", "f1", "f2"});
    return LatentKernel{parse_cm(p.value("g", json()), where),
                        parse_bernstein(p.value("f1", json()), where),
                        parse_bernstein(p.value("f2", json()), where)};
  }
  fail("unknown model family '" + family + "'");
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "top level",
             {"model", "dataset", "cutoffs", "fit", "simulate", "schoenberg",
              "predict", "output", "seed", "threads"});

  RunConfig cfg;
  cfg.config_hash = fnv1a_hex(root.dump());

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer()) {
      fail("'seed' must be a nonnegative integer");
    }
    const auto s = root["seed"].get<std::int64_t>();
    if (s < 0) fail("'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root.contains("threads")) {
    cfg.threads = root["threads"].get<int>();
    if (cfg.threads < 0) fail("'threads' must be >= 0");
  }

  if (root.contains("model")) {
    const json& m = root["model"];
    if (!m.is_object() || !m.contains("family")) {
      fail("'model' must be {family, [parameters]}");
    }
    check_keys(m, "model", {"family", "parameters"});
    cfg.model_family = m["family"].get<std::string>();
    if (m.contains("parameters")) {
      cfg.model = parse_family(cfg.model_family, m["parameters"]);
    }
  }

  if (root.contains("dataset")) {
    const json& d = root["dataset"];
    check_keys(d, "dataset", {"path", "demean", "radius_km"});
    DatasetConfig dc;
    if (!d.contains("path") || !d["path"].is_string()) {
      fail("'dataset.path' must be a string");
    }
    dc.path = d["path"].get<std::string>();
    if (d.contains("demean")) dc.demean = d["demean"].get<bool>();
    dc.radius_km = opt_number(d, "radius_km", dc.radius_km);
    if (!(dc.radius_km > 0)) fail("'dataset.radius_km' must be positive");
    cfg.dataset = dc;
  }

  if (root.contains("cutoffs")) {
    const json& c = root["cutoffs"];
    check_keys(c, "cutoffs", {"ds_max_km", "dt_max"});
    cfg.cutoffs.ds_max_km = opt_number(c, "ds_max_km", cfg.cutoffs.ds_max_km);
    cfg.cutoffs.dt_max = opt_number(c, "dt_max", cfg.cutoffs.dt_max);
    if (!(cfg.cutoffs.ds_max_km > 0) || !(cfg.cutoffs.dt_max >= 0)) {
      fail("cutoffs must satisfy ds_max_km > 0, dt_max >= 0");
    }
  }

  if (root.contains("fit")) {
    const json& f = root["fit"];
    check_keys(f, "fit", {"restarts", "max_iterations", "spread_tol", "init",
                          "bounds"});
    cfg.fit.restarts = static_cast<int>(opt_number(f, "restarts", 3));
    cfg.fit.max_iterations =
        static_cast<int>(opt_number(f, "max_iterations", 2000));
    cfg.fit.spread_tol = opt_number(f, "spread_tol", 1e-8);
    if (cfg.fit.restarts < 1 || cfg.fit.max_iterations < 1 ||
        !(cfg.fit.spread_tol > 0)) {
      fail("fit: restarts/max_iterations/spread_tol out of range");
    }
    if (f.contains("init")) {
      for (const auto& [key, val] : f["init"].items()) {
        if (!val.is_number()) fail("fit.init values must be numeric");
        cfg.fit.init[key] = val.get<double>();
      }
    }
    if (f.contains("bounds")) {
      for (const auto& [key, val] : f["bounds"].items()) {
        if (!val.is_array() || val.size() != 2) {
          fail("fit.bounds entries must be [lower, upper]");
        }
        cfg.fit.bounds[key] = {val[0].get<double>(), val[1].get<double>()};
      }
    }
  }

  if (root.contains("simulate")) {
    const json& s = root["simulate"];
    check_keys(s, "simulate",
               {"n_reps", "n_sites", "lon_range", "lat_range", "times",
                "design_path"});
    cfg.simulate.n_reps = static_cast<int>(opt_number(s, "n_reps", 1));
    cfg.simulate.n_sites = static_cast<int>(opt_number(s, "n_sites", 100));
    if (cfg.simulate.n_reps < 1 || cfg.simulate.n_sites < 1) {
      fail("simulate: n_reps and n_sites must be >= 1");
    }
    if (s.contains("lon_range")) {
      const auto v = parse_vector(s["lon_range"], "simulate.lon_range");
      if (v.size() != 2) fail("simulate.lon_range must have 2 entries");
      cfg.simulate.lon_range = {v[0], v[1]};
    }
    if (s.contains("lat_range")) {
      const auto v = parse_vector(s["lat_range"], "simulate.lat_range");
      if (v.size() != 2) fail("simulate.lat_range must have 2 entries");
      cfg.simulate.lat_range = {v[0], v[1]};
    }
    if (s.contains("times")) {
      const auto v = parse_vector(s["times"], "simulate.times");
      cfg.simulate.times.assign(v.data(), v.data() + v.size());
    }
    if (s.contains("design_path")) {
      cfg.simulate.design_path = s["design_path"].get<std::string>();
    }
  }

  if (root.contains("schoenberg")) {
    const json& s = root["schoenberg"];
    check_keys(s, "schoenberg",
               {"d", "max_order", "nodes", "mode", "lag_count", "lag_step",
                "radius_km"});
    cfg.schoenberg.d = static_cast<int>(opt_number(s, "d", 2));
    cfg.schoenberg.max_order = static_cast<int>(opt_number(s, "max_order", 50));
    cfg.schoenberg.nodes = static_cast<int>(opt_number(s, "nodes", 512));
    if (s.contains("mode")) cfg.schoenberg.mode = s["mode"].get<std::string>();
    cfg.schoenberg.lag_count =
        static_cast<int>(opt_number(s, "lag_count", 64));
    cfg.schoenberg.lag_step = opt_number(s, "lag_step", 0.25);
    cfg.schoenberg.radius_km = opt_number(s, "radius_km", kEarthRadiusKm);
    if (cfg.schoenberg.mode != "matrices" && cfg.schoenberg.mode != "functions") {
      fail("schoenberg.mode must be 'matrices' or 'functions'");
    }
    if (cfg.schoenberg.d < 1 || cfg.schoenberg.max_order < 0 ||
        cfg.schoenberg.nodes < 2 || cfg.schoenberg.lag_count < 2 ||
        !(cfg.schoenberg.lag_step > 0) || !(cfg.schoenberg.radius_km > 0)) {
      fail("schoenberg: parameter out of range");
    }
  }

  if (root.contains("predict")) {
    const json& p = root["predict"];
    check_keys(p, "predict", {"targets_path"});
    if (!p.contains("targets_path") || !p["targets_path"].is_string()) {
      fail("'predict.targets_path' must be a string");
    }
    cfg.predict.targets_path = p["targets_path"].get<std::string>();
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output", {"dir", "prefix"});
    if (o.contains("dir")) cfg.output.dir = o["dir"].get<std::string>();
    if (o.contains("prefix")) cfg.output.prefix = o["prefix"].get<std::string>();
  }

  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace sphcov
