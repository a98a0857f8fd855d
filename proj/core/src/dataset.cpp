#include "sphcov/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sphcov {

namespace {

std::string key_string(const Observation& o) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "(lon=%.17g, lat=%.17g, time=%.17g, var=%d)",
                o.point.lon(), o.point.lat(), o.time, o.variable + 1);
  return buf;
}

bool same_key(const Observation& a, const Observation& b) {
  return a.point.lon() == b.point.lon() && a.point.lat() == b.point.lat() &&
         a.time == b.time && a.variable == b.variable;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

Dataset::Dataset(std::vector<Observation> rows, double radius_km)
    : rows_(std::move(rows)), radius_km_(radius_km) {
  if (rows_.empty()) throw std::invalid_argument("Dataset: no observations");
  if (!(radius_km > 0.0)) throw std::invalid_argument("Dataset: radius must be positive");

  int max_var = 0;
  for (const auto& o : rows_) {
    if (!std::isfinite(o.value)) {
      throw std::invalid_argument("Dataset: non-finite value at key " +
                                  key_string(o));
    }
    if (o.variable < 0) {
      throw std::invalid_argument("Dataset: negative variable index");
    }
    max_var = std::max(max_var, o.variable);
  }
  m_ = max_var + 1;
  removed_means_.assign(static_cast<std::size_t>(m_), 0.0);

  // Duplicate-key scan over a sorted view; equality is exact.
  std::vector<std::size_t> idx(rows_.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = rows_[a];
    const auto& y = rows_[b];
    return std::make_tuple(x.point.lon(), x.point.lat(), x.time, x.variable) <
           std::make_tuple(y.point.lon(), y.point.lat(), y.time, y.variable);
  });
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (same_key(rows_[idx[k - 1]], rows_[idx[k]])) {
      throw std::invalid_argument("Dataset: duplicate key " +
                                  key_string(rows_[idx[k]]));
    }
  }
}

Dataset Dataset::load_csv(const std::filesystem::path& path,
                          const DatasetOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  // Skip provenance/comment lines, then require the exact header.
  std::string header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header != "lon,lat,time,var,value") {
    throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                             ": expected header 'lon,lat,time,var,value', got '" +
                             header + "'");
  }
  std::vector<Observation> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": expected 5 fields, got " +
                               std::to_string(fields.size()));
    }
    const double lon = parse_double(fields[0], line_no, "lon");
    const double lat = parse_double(fields[1], line_no, "lat");
    const double time = parse_double(fields[2], line_no, "time");
    const double var_raw = parse_double(fields[3], line_no, "var");
    const double value = parse_double(fields[4], line_no, "value");
    const int var = static_cast<int>(var_raw);
    if (var_raw != var || var < 1) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": var must be a positive integer");
    }
    try {
      rows.push_back(Observation{SpherePoint(lon, lat), time, var - 1, value});
    } catch (const std::exception& e) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    if (!std::isfinite(time)) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": non-finite time");
    }
  }
  Dataset out(std::move(rows), options.radius_km);
  if (options.demean) out = out.demean();
  return out;
}

void Dataset::save_csv(const std::filesystem::path& path,
                       const std::vector<std::string>& header_comments) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path.string());
  for (const auto& c : header_comments) out << "# " << c << "\n";
  out << "lon,lat,time,var,value\n";
  char buf[256];
  for (const auto& o : rows_) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g\n",
                  o.point.lon(), o.point.lat(), o.time, o.variable + 1,
                  o.value);
    out << buf;
  }
}

Eigen::VectorXd Dataset::values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = rows_[k].value;
  }
  return v;
}

std::vector<SpaceTimeLocation> Dataset::locations() const {
  std::vector<SpaceTimeLocation> locs;
  locs.reserve(rows_.size());
  for (const auto& o : rows_) locs.emplace_back(o.point, o.time);
  return locs;
}

std::vector<int> Dataset::variable_indices() const {
  std::vector<int> v;
  v.reserve(rows_.size());
  for (const auto& o : rows_) v.push_back(o.variable);
  return v;
}

Dataset Dataset::demean() const {
  std::vector<double> mean(static_cast<std::size_t>(m_), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(m_), 0);
  for (const auto& o : rows_) {
    mean[static_cast<std::size_t>(o.variable)] += o.value;
    ++count[static_cast<std::size_t>(o.variable)];
  }
  for (int v = 0; v < m_; ++v) {
    const auto sv = static_cast<std::size_t>(v);
    if (count[sv] > 0) mean[sv] /= static_cast<double>(count[sv]);
  }
  std::vector<Observation> rows = rows_;
  for (auto& o : rows) o.value -= mean[static_cast<std::size_t>(o.variable)];
  Dataset out(std::move(rows), radius_km_);
  out.demeaned_ = true;
  out.removed_means_ = mean;
  return out;
}

Eigen::VectorXd Dataset::empirical_variances() const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m_);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(m_);
  for (const auto& o : rows_) {
    mean[o.variable] += o.value;
    count[o.variable] += 1.0;
  }
  for (int v = 0; v < m_; ++v) mean[v] /= std::max(count[v], 1.0);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(m_);
  for (const auto& o : rows_) {
    const double d = o.value - mean[o.variable];
    var[o.variable] += d * d;
  }
  for (int v = 0; v < m_; ++v) var[v] /= std::max(count[v] - 1.0, 1.0);
  return var;
}

double Dataset::empirical_cross_correlation(int var_a, int var_b) const {
  if (var_a < 0 || var_a >= m_ || var_b < 0 || var_b >= m_) {
    throw std::invalid_argument("empirical_cross_correlation: bad variable index");
  }
  // Match collocated rows by exact (lon, lat, time) key.
  std::vector<std::size_t> idx(rows_.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = rows_[a];
    const auto& y = rows_[b];
    return std::make_tuple(x.point.lon(), x.point.lat(), x.time, x.variable) <
           std::make_tuple(y.point.lon(), y.point.lat(), y.time, y.variable);
  });
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const auto& a = rows_[idx[k - 1]];
    const auto& b = rows_[idx[k]];
    if (a.point.lon() == b.point.lon() && a.point.lat() == b.point.lat() &&
        a.time == b.time && a.variable == var_a && b.variable == var_b) {
      pairs.emplace_back(a.value, b.value);
    }
  }
  if (pairs.size() < 3) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (const auto& [x, y] : pairs) {
    ma += x;
    mb += y;
  }
  ma /= static_cast<double>(pairs.size());
  mb /= static_cast<double>(pairs.size());
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (const auto& [x, y] : pairs) {
    saa += (x - ma) * (x - ma);
    sbb += (y - mb) * (y - mb);
    sab += (x - ma) * (y - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Dataset dataset_from_realization(const Realization& realization,
                                 double radius_km) {
  const Design& design = *realization.design;
  std::vector<Observation> rows;
  rows.reserve(design.size());
  for (std::size_t k = 0; k < design.size(); ++k) {
    rows.push_back(Observation{design.locations[k].point,
                               design.locations[k].time, design.variables[k],
                               realization.values[static_cast<Eigen::Index>(k)]});
  }
  return Dataset(std::move(rows), radius_km);
}

}  // namespace sphcov
