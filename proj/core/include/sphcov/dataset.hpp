#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "sphcov/geometry.hpp"
#include "sphcov/simulate.hpp"

namespace sphcov {

/// One long-format observation row. Variables are 0-based internally;
/// the CSV schema uses 1-based ids.
struct Observation {
  SpherePoint point;
  double time;
  int variable;
  double value;
};

struct DatasetOptions {
  bool demean = false;       // per-variable mean removal on load
  double radius_km = kEarthRadiusKm;
};

/// Validated multivariate space-time observations: finite values, no
/// duplicate (lon, lat, time, variable) key, m >= 1.
class Dataset {
 public:
  Dataset(std::vector<Observation> rows, double radius_km = kEarthRadiusKm);

  /// Reads the long-format CSV (header `lon,lat,time,var,value`; `#`
  /// comment lines allowed before the header). Errors carry line numbers;
  /// duplicate keys are reported with the offending key.
  static Dataset load_csv(const std::filesystem::path& path,
                          const DatasetOptions& options = {});

  void save_csv(const std::filesystem::path& path,
                const std::vector<std::string>& header_comments = {}) const;

  std::size_t size() const { return rows_.size(); }
  int num_variables() const { return m_; }
  double radius_km() const { return radius_km_; }
  const std::vector<Observation>& rows() const { return rows_; }
  const Observation& row(std::size_t k) const { return rows_[k]; }

  bool demeaned() const { return demeaned_; }
  const std::vector<double>& removed_means() const { return removed_means_; }

  Eigen::VectorXd values() const;
  std::vector<SpaceTimeLocation> locations() const;
  std::vector<int> variable_indices() const;

  /// Per-variable mean removal; records the removed means.
  Dataset demean() const;

  /// Empirical variance per variable and collocated cross-correlation
  /// (rows sharing lon/lat/time across variable pairs), used to seed fits.
  Eigen::VectorXd empirical_variances() const;
  double empirical_cross_correlation(int var_a = 0, int var_b = 1) const;

 private:
  std::vector<Observation> rows_;
  int m_ = 0;
  double radius_km_ = kEarthRadiusKm;
  bool demeaned_ = false;
  std::vector<double> removed_means_;
};

/// Couples a simulated draw back into a Dataset (e.g. for estimator tests).
Dataset dataset_from_realization(const Realization& realization,
                                 double radius_km = kEarthRadiusKm);

}  // namespace sphcov
