#include "sphcov/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sphcov/parallel.hpp"

namespace sphcov {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_args(double theta, double u) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("cov: require theta >= 0");
  }
  if (!std::isfinite(u)) {
    throw std::invalid_argument("cov: require finite time lag");
  }
}

/// f strictly increasing on (0, inf)? PowerPlusOne degenerates at beta = 0
/// and RationalForm at b = 1 (both constant).
bool strictly_increasing(const BernsteinSpec& f) {
  switch (f.family()) {
    case BernsteinFamily::PowerPlusOne: return f.beta() > 0.0;
    case BernsteinFamily::LogForm: return true;
    case BernsteinFamily::RationalForm: return f.b() < 1.0;
  }
  return false;
}

void validate_modified_n(int n) {
  require(n >= 1 && n <= 3,
          "modified Gneiting: require n in {1, 2, 3} (d = 2 <= 2n+1)");
}

// Scalar kernel of the section-4 presets built on the Gneiting class:
// (400 theta / c_s + 1)^{-1/2} exp(-3|u|/c_t (400 theta / c_s + 1)^{-1/2}).
double gneiting_preset(double theta, double u, double c_s, double c_t) {
  const double f = 400.0 * theta / c_s + 1.0;
  const double inv_sq = 1.0 / std::sqrt(f);
  return inv_sq * std::exp(-3.0 * std::fabs(u) / c_t * inv_sq);
}

// Scalar kernel of the modified Gneiting presets (models B and C):
// (1 + 1.7|u|/c_t)^{-3} exp(-3 theta (1 + 1.7|u|/c_t) / c_ij).
double modified_preset(double theta, double u, double c_ij, double c_t) {
  const double fu = 1.0 + 1.7 * std::fabs(u) / c_t;
  return std::exp(-3.0 * theta * fu / c_ij) / (fu * fu * fu);
}

// Latent kernel of model D at scales (c_s1, c_t1), Eq. form with
// f2(theta) = 400 theta / c_s1 + 1 and f1(t) = t + 1.
double latent_preset(double theta, double u, double zeta, double c_s1,
                     double c_t1) {
  const double f2 = 400.0 * theta / c_s1 + 1.0;
  const double w = zeta / f2 + 1.0;
  const double sqw = std::sqrt(w);
  return std::exp(-3.0 * std::fabs(u) / c_t1 / sqw) / (std::sqrt(f2) * sqw);
}

void check_index(int i, int m) {
  if (i < 0 || i >= m) {
    throw std::out_of_range("cov: variable index " + std::to_string(i) +
                            " out of range for m = " + std::to_string(m));
  }
}

}  // namespace

double cov_gneiting_uni(double theta, double u, const CompletelyMonotoneSpec& g,
                        const BernsteinSpec& f) {
  require_args(theta, u);
  const double ft = f(theta);
  return g(u * u / ft) / std::sqrt(ft);
}

double cov_modified_gneiting_uni(double theta, double u, int n,
                                 const CompletelyMonotoneSpec& g,
                                 const BernsteinSpec& f) {
  require_args(theta, u);
  validate_modified_n(n);
  const double fu = f(std::fabs(u));
  return g(theta * fu) / std::pow(fu, n + 2);
}

double cov_modified_gneiting_multi(int i, int j, double theta, double u,
                                   const ModifiedGneitingMulti& spec) {
  require_args(theta, u);
  const int m = static_cast<int>(spec.sigma.size());
  check_index(i, m);
  check_index(j, m);
  const double fu = spec.f(std::fabs(u));
  return spec.sigma[i] * spec.sigma[j] * spec.rho(i, j) *
         spec.g(theta * fu / spec.scale(i, j)) / std::pow(fu, spec.n + 2);
}

double latent_kernel(double theta, double u, double zeta,
                     const LatentKernel& spec) {
  require_args(theta, u);
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw std::invalid_argument("latent_kernel: require zeta >= 0");
  }
  const double f2 = spec.f2(theta);
  const double f1 = spec.f1(zeta / f2);
  return spec.g(u * u / f1) / std::sqrt(f2 * f1);
}

double cov_model_d(int i, int j, double theta, double u, const ModelD& spec) {
  require_args(theta, u);
  check_index(i, 2);
  check_index(j, 2);
  if (i == 0 && j == 0) {
    return spec.a11 * spec.a11 *
           latent_preset(theta, u, 0.0, spec.c_s1, spec.c_t1);
  }
  if (i == 1 && j == 1) {
    return spec.a21 * spec.a21 *
               latent_preset(theta, u, 0.0, spec.c_s1, spec.c_t1) +
           spec.a22 * spec.a22 *
               gneiting_preset(theta, u, spec.c_s2, spec.c_t2);
  }
  return spec.a11 * spec.a21 *
         latent_preset(theta, u, spec.zeta12, spec.c_s1, spec.c_t1);
}

ValidityCheck check_validity_constraint(const ModifiedGneitingMulti& spec) {
  const int m = static_cast<int>(spec.sigma.size());
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double s_i = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      s_i += std::fabs(spec.rho(i, j)) *
             std::pow(spec.scale(i, i) / spec.scale(i, j), spec.n + 1);
    }
    worst = std::max(worst, s_i);
  }
  return {worst <= 1.0, worst - 1.0};
}

namespace {

void validate_family(const GneitingUnivariate&) {
  // g and f are validated at construction; any Bernstein f is admissible.
}

void validate_family(const ModifiedGneitingUni& s) {
  validate_modified_n(s.n);
  require(strictly_increasing(s.f),
          "modified Gneiting: f must be strictly increasing");
}

void validate_family(const ModifiedGneitingMulti& s) {
  validate_modified_n(s.n);
  require(strictly_increasing(s.f),
          "modified Gneiting: f must be strictly increasing");
  const auto m = s.sigma.size();
  require(m >= 1, "modified Gneiting multi: require m >= 1");
  require(s.rho.rows() == m && s.rho.cols() == m,
          "modified Gneiting multi: rho must be m x m");
  require(s.scale.rows() == m && s.scale.cols() == m,
          "modified Gneiting multi: scale must be m x m");
  for (Eigen::Index i = 0; i < m; ++i) {
    require(s.sigma[i] > 0.0, "modified Gneiting multi: require sigma_ii > 0");
    require(std::fabs(s.rho(i, i) - 1.0) <= 1e-12,
            "modified Gneiting multi: require rho_ii = 1");
    for (Eigen::Index j = 0; j < m; ++j) {
      require(std::fabs(s.rho(i, j)) <= 1.0,
              "modified Gneiting multi: require |rho_ij| <= 1");
      require(std::fabs(s.rho(i, j) - s.rho(j, i)) <= 1e-12,
              "modified Gneiting multi: rho must be symmetric");
      require(s.scale(i, j) > 0.0,
              "modified Gneiting multi: require c_ij > 0");
      require(std::fabs(s.scale(i, j) - s.scale(j, i)) <= 1e-12,
              "modified Gneiting multi: scale must be symmetric");
    }
  }
  const ValidityCheck check = check_validity_constraint(s);
  if (!check.valid) {
    throw std::invalid_argument(
        "modified Gneiting multi: validity condition violated, margin = " +
        std::to_string(check.margin));
  }
}

void validate_family(const LatentKernel&) {}

void validate_bivariate_preset(double var1, double var2, double rho12,
                               const char* name) {
  require(var1 > 0.0 && var2 > 0.0,
          std::string(name) + ": require positive variances");
  require(std::fabs(rho12) <= 1.0,
          std::string(name) + ": require |rho12| <= 1");
}

void validate_family(const ModelA& s) {
  validate_bivariate_preset(s.var1, s.var2, s.rho12, "model A");
  require(s.c_s > 0.0 && s.c_t > 0.0, "model A: require positive scales");
}

void validate_family(const ModelB& s) {
  validate_bivariate_preset(s.var1, s.var2, s.rho12, "model B");
  require(s.c_s > 0.0 && s.c_t > 0.0, "model B: require positive scales");
}

void validate_family(const ModelC& s) {
  validate_bivariate_preset(s.var1, s.var2, s.rho12, "model C");
  require(s.c11 > 0.0 && s.c22 > 0.0 && s.c_t > 0.0,
          "model C: require positive scales");
}

void validate_family(const ModelD& s) {
  require(s.a11 > 0.0, "model D: require a11 > 0");
  require(s.a22 > 0.0, "model D: require a22 > 0");
  require(std::isfinite(s.a21), "model D: require finite a21");
  require(s.zeta12 >= 0.0, "model D: require zeta12 >= 0");
  require(s.c_s1 > 0.0 && s.c_s2 > 0.0 && s.c_t1 > 0.0 && s.c_t2 > 0.0,
          "model D: require positive scales");
}

int family_num_variables(const ModelSpec::Family& family) {
  if (std::holds_alternative<ModifiedGneitingMulti>(family)) {
    return static_cast<int>(std::get<ModifiedGneitingMulti>(family).sigma.size());
  }
  if (std::holds_alternative<ModelA>(family) ||
      std::holds_alternative<ModelB>(family) ||
      std::holds_alternative<ModelC>(family) ||
      std::holds_alternative<ModelD>(family)) {
    return 2;
  }
  return 1;
}

ModifiedGneitingMulti as_multi(const ModelB& s) {
  Eigen::VectorXd sigma(2);
  sigma << std::sqrt(s.var1), std::sqrt(s.var2);
  Eigen::MatrixXd rho(2, 2), scale(2, 2);
  rho << 1.0, s.rho12, s.rho12, 1.0;
  scale << s.c_s, s.c_s, s.c_s, s.c_s;
  return {1, CompletelyMonotoneSpec::pow_exp(3.0, 1.0),
          BernsteinSpec::power_plus_one(1.7 / s.c_t, 1.0, 1.0), sigma, rho,
          scale};
}

ModifiedGneitingMulti as_multi(const ModelC& s) {
  Eigen::VectorXd sigma(2);
  sigma << std::sqrt(s.var1), std::sqrt(s.var2);
  Eigen::MatrixXd rho(2, 2), scale(2, 2);
  rho << 1.0, s.rho12, s.rho12, 1.0;
  scale << s.c11, s.c12(), s.c12(), s.c22;
  return {1, CompletelyMonotoneSpec::pow_exp(3.0, 1.0),
          BernsteinSpec::power_plus_one(1.7 / s.c_t, 1.0, 1.0), sigma, rho,
          scale};
}

}  // namespace

ModelSpec::ModelSpec(Family family) : family_(std::move(family)) {
  std::visit([](const auto& f) { validate_family(f); }, family_);
  m_ = family_num_variables(family_);
}

std::string ModelSpec::family_name() const {
  struct Namer {
    std::string operator()(const GneitingUnivariate&) const { return "gneiting_univariate"; }
    std::string operator()(const ModifiedGneitingUni&) const { return "modified_gneiting_uni"; }
    std::string operator()(const ModifiedGneitingMulti&) const { return "modified_gneiting_multi"; }
    std::string operator()(const LatentKernel&) const { return "latent_kernel"; }
    std::string operator()(const ModelA&) const { return "model_a"; }
    std::string operator()(const ModelB&) const { return "model_b"; }
    std::string operator()(const ModelC&) const { return "model_c"; }
    std::string operator()(const ModelD&) const { return "model_d"; }
  };
  return std::visit(Namer{}, family_);
}

double ModelSpec::cov(int i, int j, double theta, double u) const {
  check_index(i, m_);
  check_index(j, m_);
  struct Eval {
    int i, j;
    double theta, u;
    double operator()(const GneitingUnivariate& s) const {
      return cov_gneiting_uni(theta, u, s.g, s.f);
    }
    double operator()(const ModifiedGneitingUni& s) const {
      return cov_modified_gneiting_uni(theta, u, s.n, s.g, s.f);
    }
    double operator()(const ModifiedGneitingMulti& s) const {
      return cov_modified_gneiting_multi(i, j, theta, u, s);
    }
    double operator()(const LatentKernel& s) const {
      return latent_kernel(theta, u, 0.0, s);
    }
    double operator()(const ModelA& s) const {
      require_args(theta, u);
      const double sig =
          (i == j) ? (i == 0 ? s.var1 : s.var2)
                   : s.rho12 * std::sqrt(s.var1) * std::sqrt(s.var2);
      return sig * gneiting_preset(theta, u, s.c_s, s.c_t);
    }
    double operator()(const ModelB& s) const {
      require_args(theta, u);
      const double sig =
          (i == j) ? (i == 0 ? s.var1 : s.var2)
                   : s.rho12 * std::sqrt(s.var1) * std::sqrt(s.var2);
      return sig * modified_preset(theta, u, s.c_s, s.c_t);
    }
    double operator()(const ModelC& s) const {
      require_args(theta, u);
      if (i == j) {
        const double c_ii = (i == 0) ? s.c11 : s.c22;
        const double var = (i == 0) ? s.var1 : s.var2;
        return var * modified_preset(theta, u, c_ii, s.c_t);
      }
      return s.rho12 * std::sqrt(s.var1) * std::sqrt(s.var2) *
             modified_preset(theta, u, s.c12(), s.c_t);
    }
    double operator()(const ModelD& s) const {
      return cov_model_d(i, j, theta, u, s);
    }
  };
  return std::visit(Eval{i, j, theta, u}, family_);
}

ValidityCheck check_validity_constraint(const ModelSpec& spec) {
  if (const auto* multi = std::get_if<ModifiedGneitingMulti>(&spec.family())) {
    return check_validity_constraint(*multi);
  }
  if (const auto* b = std::get_if<ModelB>(&spec.family())) {
    return check_validity_constraint(as_multi(*b));
  }
  if (const auto* c = std::get_if<ModelC>(&spec.family())) {
    return check_validity_constraint(as_multi(*c));
  }
  throw std::invalid_argument(
      "check_validity_constraint: spec is not of modified Gneiting type");
}

std::optional<ValidityCheck> askey_check(const ModelSpec::Family& family) {
  if (const auto* multi = std::get_if<ModifiedGneitingMulti>(&family)) {
    return check_validity_constraint(*multi);
  }
  if (const auto* b = std::get_if<ModelB>(&family)) {
    return check_validity_constraint(as_multi(*b));
  }
  if (const auto* c = std::get_if<ModelC>(&family)) {
    return check_validity_constraint(as_multi(*c));
  }
  return std::nullopt;
}

CovarianceMatrix assemble_covariance(std::span<const SpaceTimeLocation> locations,
                                     std::span<const int> var_index,
                                     const ModelSpec& spec,
                                     const AssemblyOptions& options) {
  const std::size_t n = locations.size();
  if (var_index.size() != n) {
    throw std::invalid_argument(
        "assemble_covariance: locations and var_index lengths differ");
  }
  if (n > options.max_size) {
    throw std::invalid_argument(
        "assemble_covariance: system size " + std::to_string(n) +
        " exceeds the cap of " + std::to_string(options.max_size) +
        "; raise AssemblyOptions::max_size explicitly for larger systems");
  }
  for (const int v : var_index) check_index(v, spec.num_variables());

  CovarianceMatrix out;
  out.model = spec.family_name();
  out.radius_km = options.radius_km;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  // Upper triangle by rows; each unordered pair evaluated exactly once.
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        const double theta = geodesic_km(locations[a].point,
                                         locations[b].point, options.radius_km);
        const double u = locations[a].time - locations[b].time;
        out.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            spec.cov(var_index[a], var_index[b], theta, u);
      }
    }
  });
  out.values.triangularView<Eigen::StrictlyLower>() =
      out.values.triangularView<Eigen::StrictlyUpper>().transpose();
  return out;
}

ParameterVector::ParameterVector(std::vector<Parameter> params)
    : params_(std::move(params)) {
  for (const auto& p : params_) {
    if (!std::isfinite(p.value)) {
      throw std::invalid_argument("ParameterVector: non-finite value for " +
                                  p.name);
    }
  }
}

Eigen::VectorXd ParameterVector::values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(params_.size()));
  for (std::size_t k = 0; k < params_.size(); ++k) v[static_cast<Eigen::Index>(k)] = params_[k].value;
  return v;
}

Eigen::VectorXd ParameterVector::transformed() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(params_.size()));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] =
        apply_transform(params_[k].transform, params_[k].value);
  }
  return v;
}

ParameterVector ParameterVector::with_values(const Eigen::VectorXd& natural) const {
  if (static_cast<std::size_t>(natural.size()) != params_.size()) {
    throw std::invalid_argument("ParameterVector::with_values: size mismatch");
  }
  std::vector<Parameter> out = params_;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].value = natural[static_cast<Eigen::Index>(k)];
  }
  return ParameterVector(std::move(out));
}

Eigen::VectorXd ParameterVector::natural_from_transformed(
    const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != params_.size()) {
    throw std::invalid_argument(
        "ParameterVector::natural_from_transformed: size mismatch");
  }
  Eigen::VectorXd v(z.size());
  for (std::size_t k = 0; k < params_.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] =
        invert_transform(params_[k].transform, z[static_cast<Eigen::Index>(k)]);
  }
  return v;
}

bool ParameterVector::within_bounds(const Eigen::VectorXd& natural) const {
  if (static_cast<std::size_t>(natural.size()) != params_.size()) return false;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const double v = natural[static_cast<Eigen::Index>(k)];
    if (!(v >= params_[k].lower && v <= params_[k].upper)) return false;
  }
  return true;
}

int ParameterVector::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (params_[k].name == name) return static_cast<int>(k);
  }
  return -1;
}

double ParameterVector::value_of(const std::string& name) const {
  const int k = index_of(name);
  if (k < 0) throw std::invalid_argument("ParameterVector: no parameter " + name);
  return params_[static_cast<std::size_t>(k)].value;
}

void ParameterVector::set(const std::string& name, double value) {
  const int k = index_of(name);
  if (k < 0) throw std::invalid_argument("ParameterVector: no parameter " + name);
  params_[static_cast<std::size_t>(k)].value = value;
}

double apply_transform(Transform t, double natural) {
  switch (t) {
    case Transform::Identity: return natural;
    case Transform::Log:
      if (!(natural > 0.0)) {
        throw std::invalid_argument("transform: log of nonpositive value");
      }
      return std::log(natural);
    case Transform::Atanh:
      if (!(natural > -1.0 && natural < 1.0)) {
        throw std::invalid_argument("transform: atanh outside (-1, 1)");
      }
      return std::atanh(natural);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double invert_transform(Transform t, double transformed) {
  switch (t) {
    case Transform::Identity: return transformed;
    case Transform::Log: return std::exp(transformed);
    case Transform::Atanh: return std::tanh(transformed);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace sphcov
