#include "sphcov/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphcov {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_nonneg_arg(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(who) + ": argument must be finite and >= 0");
  }
}

}  // namespace

CompletelyMonotoneSpec::CompletelyMonotoneSpec(CmFamily f, double c,
                                               double gamma, double nu)
    : family_(f), c_(c), gamma_(gamma), nu_(nu) {}

CompletelyMonotoneSpec CompletelyMonotoneSpec::pow_exp(double c, double gamma) {
  require(c > 0.0, "pow_exp: require c > 0");
  require(gamma > 0.0 && gamma <= 1.0, "pow_exp: require 0 < gamma <= 1");
  return {CmFamily::PowExp, c, gamma, 0.0};
}

CompletelyMonotoneSpec CompletelyMonotoneSpec::matern(double c, double nu) {
  require(c > 0.0, "matern: require c > 0");
  require(nu > 0.0, "matern: require nu > 0");
  return {CmFamily::Matern, c, 0.0, nu};
}

CompletelyMonotoneSpec CompletelyMonotoneSpec::gen_cauchy(double c,
                                                          double gamma,
                                                          double nu) {
  require(c > 0.0, "gen_cauchy: require c > 0");
  require(gamma > 0.0 && gamma <= 1.0, "gen_cauchy: require 0 < gamma <= 1");
  require(nu > 0.0, "gen_cauchy: require nu > 0");
  return {CmFamily::GenCauchy, c, gamma, nu};
}

CompletelyMonotoneSpec CompletelyMonotoneSpec::hyperbolic_secant_pow(
    double c, double nu) {
  require(c > 0.0, "hyperbolic_secant_pow: require c > 0");
  require(nu > 0.0, "hyperbolic_secant_pow: require nu > 0");
  return {CmFamily::HyperbolicSecantPow, c, 0.0, nu};
}

double CompletelyMonotoneSpec::operator()(double t) const {
  require_nonneg_arg(t, "eval_cm");
  switch (family_) {
    case CmFamily::PowExp:
      return std::exp(-c_ * std::pow(t, gamma_));
    case CmFamily::Matern: {
      if (t == 0.0) return 1.0;  // limit of z^nu K_nu(z) as z -> 0
      const double z = c_ * std::sqrt(t);
      const double log_pref =
          nu_ * std::log(z) - (nu_ - 1.0) * std::numbers::ln2 - std::lgamma(nu_);
      // K_nu underflows for large z; pair it with the prefactor in log space.
      if (z > 700.0) return 0.0;
      const double k = bessel_k(nu_, z);
      if (k <= 0.0) return 0.0;
      return std::exp(log_pref + std::log(k));
    }
    case CmFamily::GenCauchy:
      return std::pow(1.0 + c_ * std::pow(t, gamma_), -nu_);
    case CmFamily::HyperbolicSecantPow: {
      const double z = c_ * std::sqrt(t);
      // 2^nu (e^z + e^-z)^-nu = exp(-nu (log(e^z + e^-z) - log 2))
      // = exp(-nu (z + log1p(e^-2z) - log 2)); stable for large z.
      return std::exp(-nu_ * (z + std::log1p(std::exp(-2.0 * z)) -
                              std::numbers::ln2));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_cm(const CompletelyMonotoneSpec& spec, double t) { return spec(t); }

BernsteinSpec::BernsteinSpec(BernsteinFamily f, double a, double alpha,
                             double beta, double b)
    : family_(f), a_(a), alpha_(alpha), beta_(beta), b_(b) {}

BernsteinSpec BernsteinSpec::power_plus_one(double a, double alpha,
                                            double beta) {
  require(a > 0.0, "power_plus_one: require a > 0");
  require(alpha > 0.0 && alpha <= 1.0, "power_plus_one: require 0 < alpha <= 1");
  require(beta >= 0.0 && beta <= 1.0, "power_plus_one: require 0 <= beta <= 1");
  return {BernsteinFamily::PowerPlusOne, a, alpha, beta, 0.0};
}

BernsteinSpec BernsteinSpec::log_form(double a, double alpha, double b) {
  require(a > 0.0, "log_form: require a > 0");
  require(alpha > 0.0 && alpha <= 1.0, "log_form: require 0 < alpha <= 1");
  require(b > 1.0, "log_form: require b > 1");
  return {BernsteinFamily::LogForm, a, alpha, 0.0, b};
}

BernsteinSpec BernsteinSpec::rational_form(double a, double alpha, double b) {
  require(a > 0.0, "rational_form: require a > 0");
  require(alpha > 0.0 && alpha <= 1.0, "rational_form: require 0 < alpha <= 1");
  require(b > 0.0 && b <= 1.0, "rational_form: require 0 < b <= 1");
  return {BernsteinFamily::RationalForm, a, alpha, 0.0, b};
}

double BernsteinSpec::operator()(double t) const {
  require_nonneg_arg(t, "eval_bernstein");
  switch (family_) {
    case BernsteinFamily::PowerPlusOne:
      return std::pow(a_ * std::pow(t, alpha_) + 1.0, beta_);
    case BernsteinFamily::LogForm:
      return std::log(a_ * std::pow(t, alpha_) + b_) / std::log(b_);
    case BernsteinFamily::RationalForm: {
      const double s = a_ * std::pow(t, alpha_);
      return (s + b_) / (b_ * (s + 1.0));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_bernstein(const BernsteinSpec& spec, double t) { return spec(t); }

double gegenbauer(int n, double lambda, double x) {
  require(n >= 0, "gegenbauer: require n >= 0");
  require(lambda >= 0.0 && std::isfinite(lambda), "gegenbauer: require lambda >= 0");
  require(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12,
          "gegenbauer: require x in [-1, 1]");
  x = std::clamp(x, -1.0, 1.0);
  if (lambda == 0.0) {
    // Chebyshev limit T_n := G_n^0.
    return std::cos(n * std::acos(x));
  }
  if (n == 0) return 1.0;
  double gm2 = 1.0;
  double gm1 = 2.0 * lambda * x;
  if (n == 1) return gm1;
  double g = 0.0;
  for (int k = 2; k <= n; ++k) {
    g = (2.0 * x * (k + lambda - 1.0) * gm1 - (k + 2.0 * lambda - 2.0) * gm2) /
        static_cast<double>(k);
    gm2 = gm1;
    gm1 = g;
  }
  return g;
}

namespace {

// Temme's series for K_mu(z), K_{mu+1}(z) with |mu| <= 1/2, z <= 2.
void bessel_k_temme(double mu, double z, double& kmu, double& kmu1) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 1000;

  const double half_z = 0.5 * z;
  const double log_half = -std::log(half_z);  // = ln(2/z)
  const double sigma = mu * log_half;
  const double mu_pi = kPi * mu;
  const double fact =
      (std::fabs(mu_pi) < 1e-14) ? 1.0 : mu_pi / std::sin(mu_pi);
  const double sinhc = (std::fabs(sigma) < 1e-10)
                           ? 1.0 + sigma * sigma / 6.0
                           : std::sinh(sigma) / sigma;

  const double gampl = 1.0 / std::tgamma(1.0 + mu);  // 1/Gamma(1+mu)
  const double gammi = 1.0 / std::tgamma(1.0 - mu);  // 1/Gamma(1-mu)
  const double gam2 = 0.5 * (gammi + gampl);
  // gam1 = (gammi - gampl) / (2 mu); stable form via expm1 as mu -> 0.
  const double lg_delta = std::lgamma(1.0 + mu) - std::lgamma(1.0 - mu);
  const double gam1 = (std::fabs(mu) < 1e-14)
                          ? -0.57721566490153286  /* -Euler gamma */
                          : gampl * std::expm1(lg_delta) / (2.0 * mu);

  double f = fact * (std::cosh(sigma) * gam1 + sinhc * log_half * gam2);
  double p = 0.5 * std::exp(sigma) / gampl;
  double q = 0.5 * std::exp(-sigma) / gammi;
  double c = 1.0;
  const double d = half_z * half_z;
  double sum = f;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= max_iter; ++i) {
    f = (i * f + p + q) / (i * i - mu2);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * f;
    sum += del;
    sum1 += c * (p - i * f);
    if (std::fabs(del) < std::fabs(sum) * eps) break;
  }
  kmu = sum;
  kmu1 = sum1 * (2.0 / z);
}

// Steed's continued fraction CF2 for K_mu(z), K_{mu+1}(z), z > 2.
void bessel_k_cf2(double mu, double z, double& kmu, double& kmu1) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 10000;

  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double delh = d;
  double h = delh;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= max_iter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < eps) break;
  }
  h = a1 * h;
  kmu = std::sqrt(kPi / (2.0 * z)) * std::exp(-z) / s;
  kmu1 = kmu * (mu + z + 0.5 - h) / z;
}

}  // namespace

double bessel_k(double nu, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("bessel_k: require z > 0");
  }
  nu = std::fabs(nu);  // K_nu = K_{-nu}
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;  // in [-1/2, 1/2]
  double kmu, kmu1;
  if (z <= 2.0) {
    bessel_k_temme(mu, z, kmu, kmu1);
  } else {
    bessel_k_cf2(mu, z, kmu, kmu1);
  }
  // Upward recurrence K_{a+1} = K_{a-1} + (2a/z) K_a is stable for K.
  double km = kmu;
  double k1 = kmu1;
  for (int j = 1; j <= nl; ++j) {
    const double k2 = km + 2.0 * (mu + j) / z * k1;
    km = k1;
    k1 = k2;
  }
  return km;
}

std::string to_string(CmFamily f) {
  switch (f) {
    case CmFamily::PowExp: return "pow_exp";
    case CmFamily::Matern: return "matern";
    case CmFamily::GenCauchy: return "gen_cauchy";
    case CmFamily::HyperbolicSecantPow: return "hyperbolic_secant_pow";
  }
  return "?";
}

std::string to_string(BernsteinFamily f) {
  switch (f) {
    case BernsteinFamily::PowerPlusOne: return "power_plus_one";
    case BernsteinFamily::LogForm: return "log_form";
    case BernsteinFamily::RationalForm: return "rational_form";
  }
  return "?";
}

}  // namespace sphcov
