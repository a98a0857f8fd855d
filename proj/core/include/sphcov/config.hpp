#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphcov/models.hpp"

namespace sphcov {

struct DatasetConfig {
  std::string path;
  bool demean = false;
  double radius_km = kEarthRadiusKm;
};

struct CutoffsConfig {
  double ds_max_km = 1275.6;  // 0.2 rad on the radius-6378 sphere
  double dt_max = 4.0;
};

struct FitConfig {
  int restarts = 3;
  int max_iterations = 2000;
  double spread_tol = 1e-8;
  std::map<std::string, double> init;                    // overrides
  std::map<std::string, std::array<double, 2>> bounds;   // overrides
};

struct SimulateConfig {
  int n_reps = 1;
  int n_sites = 100;
  std::array<double, 2> lon_range{50.0, 150.0};
  std::array<double, 2> lat_range{-50.0, 0.0};
  std::vector<double> times{0, 1, 2, 3, 4};
  std::string design_path;  // optional: lon,lat,time,var CSV instead
};

struct SchoenbergConfig {
  int d = 2;
  int max_order = 50;
  int nodes = 512;
  std::string mode = "matrices";  // or "functions"
  int lag_count = 64;
  double lag_step = 0.25;
  // The models consume distances in km; coefficients are computed over
  // theta in [0, pi] radians by evaluating at theta * radius_km. Use 1 for
  // models parameterized directly in radians.
  double radius_km = kEarthRadiusKm;
};

struct PredictTargetsConfig {
  std::string targets_path;
};

struct OutputConfig {
  std::string dir = ".";
  std::string prefix;
};

/// Parsed and schema-validated run configuration. The `model` member is
/// the raw family (validated structurally on access via ModelSpec); for
/// the fit subcommand only the family name is required.
struct RunConfig {
  std::optional<ModelSpec::Family> model;
  std::string model_family;

  std::optional<DatasetConfig> dataset;
  CutoffsConfig cutoffs;
  FitConfig fit;
  SimulateConfig simulate;
  SchoenbergConfig schoenberg;
  PredictTargetsConfig predict;
  OutputConfig output;

  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all cores

  std::string config_hash;  // FNV-1a 64 of the canonical JSON
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, hex-encoded (used for provenance records).
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sphcov
