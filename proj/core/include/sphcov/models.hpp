#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sphcov/geometry.hpp"
#include "sphcov/specfun.hpp"

namespace sphcov {

// ---------------------------------------------------------------------------
// Covariance families. Spatial arguments are great-circle distances in
// kilometers on a radius-6378 sphere (scale parameters in Table-3 magnitudes);
// the validity module works in radians on [0, pi] by rescaling the scales.
// ---------------------------------------------------------------------------

/// C(theta, u) = f(theta)^{-1/2} g(u^2 / f(theta)); valid on S^d x R for
/// every d when g is completely monotone and f Bernstein.
struct GneitingUnivariate {
  CompletelyMonotoneSpec g;
  BernsteinSpec f;
};

/// C(theta, u) = f(|u|)^{-(n+2)} g(theta f(|u|)); valid on S^d x R for
/// d <= 2n+1, with f strictly increasing and concave, n in {1, 2, 3}.
struct ModifiedGneitingUni {
  int n;
  CompletelyMonotoneSpec g;
  BernsteinSpec f;
};

/// Multivariate modified Gneiting class:
///   C_ij(theta, u) = sigma_i sigma_j rho_ij f(|u|)^{-(n+2)} g(theta f(|u|) / c_ij)
/// subject to, for each i,  sum_{j != i} |rho_ij| (c_ii / c_ij)^{n+1} <= 1.
struct ModifiedGneitingMulti {
  int n;
  CompletelyMonotoneSpec g;
  BernsteinSpec f;
  Eigen::VectorXd sigma;  // standard deviations, size m
  Eigen::MatrixXd rho;    // correlations, unit diagonal, symmetric
  Eigen::MatrixXd scale;  // c_ij > 0, symmetric
};

/// Latent-dimension kernel on S^d x R x R:
///   K(theta, u, zeta) = f2(theta)^{-1/2} f1(zeta / f2(theta))^{-1/2}
///                       g(u^2 / f1(zeta / f2(theta)))
struct LatentKernel {
  CompletelyMonotoneSpec g;
  BernsteinSpec f1;
  BernsteinSpec f2;
};

/// m-separable Gneiting preset:
///   C_ij = sigma_i sigma_j rho_ij (400 theta / c_s + 1)^{-1/2}
///          exp(-3 |u| / c_t (400 theta / c_s + 1)^{-1/2})
struct ModelA {
  double var1, var2;  // sigma_11^2, sigma_22^2
  double rho12;
  double c_s, c_t;
};

/// m-separable modified Gneiting preset (single spatial scale c_s):
///   C_ij = sigma_i sigma_j rho_ij (1 + 1.7 |u| / c_t)^{-3}
///          exp(-3 theta (1 + 1.7 |u| / c_t) / c_s)
struct ModelB {
  double var1, var2;
  double rho12;
  double c_s, c_t;
};

/// Non-separable modified Gneiting preset with c_12 = max(c_11, c_22).
struct ModelC {
  double var1, var2;
  double rho12;
  double c11, c22;
  double c_t;

  double c12() const { return c11 > c22 ? c11 : c22; }
};

/// Bivariate latent-dimension LMC preset:
///   C_11 = a11^2 K(theta, u, 0)
///   C_22 = a21^2 K(theta, u, 0) + a22^2 R(theta, u)
///   C_12 = a11 a21 K(theta, u, zeta12)
/// with K the latent kernel at scales (c_s1, c_t1) and R a Gneiting factor
/// at scales (c_s2, c_t2).
struct ModelD {
  double a11, a21, a22;
  double c_s1, c_s2;
  double c_t1, c_t2;
  double zeta12;
};

// Pointwise evaluations -----------------------------------------------------

double cov_gneiting_uni(double theta, double u, const CompletelyMonotoneSpec& g,
                        const BernsteinSpec& f);
double cov_modified_gneiting_uni(double theta, double u, int n,
                                 const CompletelyMonotoneSpec& g,
                                 const BernsteinSpec& f);
double cov_modified_gneiting_multi(int i, int j, double theta, double u,
                                   const ModifiedGneitingMulti& spec);
double latent_kernel(double theta, double u, double zeta,
                     const LatentKernel& spec);
double cov_model_d(int i, int j, double theta, double u, const ModelD& spec);

struct ValidityCheck {
  bool valid;
  double margin;  // max_i s_i - 1; nonpositive when valid
};

/// Checks the multivariate modified Gneiting parameter condition
/// s_i = sum_{j != i} |rho_ij| (c_ii / c_ij)^{n+1} <= 1 for each i.
ValidityCheck check_validity_constraint(const ModifiedGneitingMulti& spec);

// ---------------------------------------------------------------------------
// ModelSpec: tagged union over all families, validated on construction.
// ---------------------------------------------------------------------------

class ModelSpec {
 public:
  using Family =
      std::variant<GneitingUnivariate, ModifiedGneitingUni,
                   ModifiedGneitingMulti, LatentKernel, ModelA, ModelB, ModelC,
                   ModelD>;

  /// Throws std::invalid_argument when parameter restrictions are violated
  /// (including the multivariate validity constraint).
  explicit ModelSpec(Family family);

  int num_variables() const { return m_; }
  const Family& family() const { return family_; }
  std::string family_name() const;

  /// Covariance between variables i and j (0-based) at spatial distance
  /// theta (km) and temporal lag u. Throws for indices out of range.
  double cov(int i, int j, double theta, double u) const;

 private:
  Family family_;
  int m_;
};

ValidityCheck check_validity_constraint(const ModelSpec& spec);

/// Validity-constraint margin for the raw (possibly not-yet-valid) family:
/// present for the modified Gneiting types (multi, model B, model C),
/// nullopt otherwise. Usable before ModelSpec construction.
std::optional<ValidityCheck> askey_check(const ModelSpec::Family& family);

// Dense covariance assembly -------------------------------------------------

struct AssemblyOptions {
  double radius_km = kEarthRadiusKm;
  std::size_t max_size = 5000;  // refuse larger systems
};

struct CovarianceMatrix {
  Eigen::MatrixXd values;
  std::string model;
  double radius_km = kEarthRadiusKm;
};

/// Dense symmetric matrix C[a, b] = C_{v(a) v(b)}(theta(x_a, x_b), t_a - t_b)
/// over (location, variable) rows; each unordered pair is computed once.
CovarianceMatrix assemble_covariance(std::span<const SpaceTimeLocation> locations,
                                     std::span<const int> var_index,
                                     const ModelSpec& spec,
                                     const AssemblyOptions& options = {});

// ---------------------------------------------------------------------------
// ParameterVector: named parameters with transforms for unconstrained
// optimization (log for positive scales, atanh for correlations).
// ---------------------------------------------------------------------------

enum class Transform : std::uint8_t { Identity, Log, Atanh };

struct Parameter {
  std::string name;
  double value = 0.0;
  Transform transform = Transform::Identity;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<Parameter> params);

  std::size_t size() const { return params_.size(); }
  const Parameter& operator[](std::size_t k) const { return params_[k]; }
  const std::vector<Parameter>& entries() const { return params_; }

  Eigen::VectorXd values() const;
  Eigen::VectorXd transformed() const;

  /// Same names/transforms/bounds with new natural-space values.
  ParameterVector with_values(const Eigen::VectorXd& natural) const;
  /// Natural-space values recovered from transformed coordinates.
  Eigen::VectorXd natural_from_transformed(const Eigen::VectorXd& z) const;
  /// True when every value lies within its [lower, upper] bounds.
  bool within_bounds(const Eigen::VectorXd& natural) const;

  int index_of(const std::string& name) const;  // -1 when absent
  double value_of(const std::string& name) const;
  void set(const std::string& name, double value);

 private:
  std::vector<Parameter> params_;
};

double apply_transform(Transform t, double natural);
double invert_transform(Transform t, double transformed);

}  // namespace sphcov
