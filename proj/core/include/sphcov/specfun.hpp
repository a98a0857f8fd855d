#pragma once

#include <string>

namespace sphcov {

/// Catalog of completely monotone functions g : [0, inf) -> (0, g(0)].
///
///   PowExp              g(t) = exp(-c t^gamma)
///   Matern              g(t) = (2^(nu-1) Gamma(nu))^-1 (c sqrt(t))^nu K_nu(c sqrt(t))
///   GenCauchy           g(t) = (1 + c t^gamma)^-nu
///   HyperbolicSecantPow g(t) = 2^nu (exp(c sqrt(t)) + exp(-c sqrt(t)))^-nu
enum class CmFamily { PowExp, Matern, GenCauchy, HyperbolicSecantPow };

class CompletelyMonotoneSpec {
 public:
  static CompletelyMonotoneSpec pow_exp(double c, double gamma);
  static CompletelyMonotoneSpec matern(double c, double nu);
  static CompletelyMonotoneSpec gen_cauchy(double c, double gamma, double nu);
  static CompletelyMonotoneSpec hyperbolic_secant_pow(double c, double nu);

  CmFamily family() const { return family_; }
  double c() const { return c_; }
  double gamma() const { return gamma_; }
  double nu() const { return nu_; }

  double operator()(double t) const;

 private:
  CompletelyMonotoneSpec(CmFamily f, double c, double gamma, double nu);

  CmFamily family_;
  double c_;
  double gamma_;
  double nu_;
};

/// Catalog of Bernstein functions f : [0, inf) -> (0, inf), positive with
/// completely monotone derivative (nondecreasing and concave).
///
///   PowerPlusOne  f(t) = (a t^alpha + 1)^beta        a>0, 0<alpha<=1, 0<=beta<=1
///   LogForm       f(t) = ln(a t^alpha + b) / ln(b)   a>0, b>1,  0<alpha<=1
///   RationalForm  f(t) = (a t^alpha + b) / (b (a t^alpha + 1))
///                                                    a>0, 0<b<=1, 0<alpha<=1
enum class BernsteinFamily { PowerPlusOne, LogForm, RationalForm };

class BernsteinSpec {
 public:
  static BernsteinSpec power_plus_one(double a, double alpha, double beta);
  static BernsteinSpec log_form(double a, double alpha, double b);
  static BernsteinSpec rational_form(double a, double alpha, double b);

  BernsteinFamily family() const { return family_; }
  double a() const { return a_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double b() const { return b_; }

  double operator()(double t) const;

 private:
  BernsteinSpec(BernsteinFamily f, double a, double alpha, double beta,
                double b);

  BernsteinFamily family_;
  double a_;
  double alpha_;
  double beta_;
  double b_;
};

double eval_cm(const CompletelyMonotoneSpec& spec, double t);
double eval_bernstein(const BernsteinSpec& spec, double t);

/// Gegenbauer (ultraspherical) polynomial G_n^lambda(x) for x in [-1, 1],
/// evaluated by the three-term recurrence. lambda = 0 is the Chebyshev
/// limit T_n(x) = cos(n arccos x); lambda = 1/2 gives Legendre P_n.
double gegenbauer(int n, double lambda, double x);

/// Modified Bessel function of the second kind K_nu(z), nu real, z > 0.
/// Even in nu. Series expansion for z <= 2, continued fraction beyond;
/// relative accuracy better than 1e-10 on z in [1e-6, 50].
double bessel_k(double nu, double z);

std::string to_string(CmFamily f);
std::string to_string(BernsteinFamily f);

}  // namespace sphcov
