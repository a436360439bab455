#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gmd/errors.hpp"

namespace gmd {

namespace detail {

inline void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(who) + ": argument must be finite");
  }
}

// Lanczos approximation, g = 7, 9 coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double xm1) {
  double a = kLanczosCoef[0];
  for (std::size_t k = 1; k < kLanczosCoef.size(); ++k) {
    a += kLanczosCoef[k] / (xm1 + static_cast<double>(k));
  }
  return a;
}

}  // namespace detail

/// Degrees of freedom of a Student-t law. Always strictly positive; the moment
/// checks report which condition failed.
class DegreesOfFreedom {
public:
  explicit DegreesOfFreedom(double nu) : nu_(nu) {
    if (!(nu > 0.0) || std::isnan(nu)) {
      throw DomainError("degrees of freedom must satisfy nu > 0 (got " + std::to_string(nu) + ")");
    }
  }

  double value() const noexcept { return nu_; }

  bool has_mean() const noexcept { return nu_ > 1.0; }
  bool has_variance() const noexcept { return nu_ > 2.0; }

  void require_mean() const {
    if (!has_mean()) {
      throw MomentError("mean does not exist: requires nu > 1 (got " + std::to_string(nu_) + ")");
    }
  }
  void require_variance() const {
    if (!has_variance()) {
      throw MomentError("variance does not exist: requires nu > 2 (got " + std::to_string(nu_) +
                        ")");
    }
  }

private:
  double nu_;
};

inline double std_normal_pdf(double x) {
  detail::require_finite(x, "std_normal_pdf");
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

inline double std_normal_cdf(double x) {
  detail::require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation; relative error below 1.2e-9.
inline double normal_quantile_rational(double p) {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01,  -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Inverse of the standard normal CDF on (0, 1): rational start plus one Halley
/// correction.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: probability must lie in (0, 1)");
  }
  double x = detail::normal_quantile_rational(p);
  // Work on the smaller tail so the residual keeps its relative precision.
  const double e = (p < 0.5) ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

/// Gamma function for x > 0 via Lanczos (reflection below 1/2).
inline double gamma_fn(double x) {
  detail::require_finite(x, "gamma_fn");
  if (!(x > 0.0)) {
    throw DomainError("gamma_fn: argument must be positive");
  }
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  const double xm1 = x - 1.0;
  const double t = xm1 + detail::kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, xm1 + 0.5) * std::exp(-t) *
         detail::lanczos_sum(xm1);
}

inline double log_gamma(double x) {
  detail::require_finite(x, "log_gamma");
  if (!(x > 0.0)) {
    throw DomainError("log_gamma: argument must be positive");
  }
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double xm1 = x - 1.0;
  const double t = xm1 + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_sum(xm1));
}

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-16;
  constexpr int max_iter = 100000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NonConvergenceError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b). The complement 1 - x is passed
/// separately so callers can supply it without cancellation.
inline double regularized_incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw DomainError("regularized_incomplete_beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("regularized_incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (one_minus_x == 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(one_minus_x) -
                           (log_gamma(a) + log_gamma(b) - log_gamma(a + b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * detail::beta_continued_fraction(b, a, one_minus_x) / b;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

inline double student_t_pdf(double x, DegreesOfFreedom dof) {
  detail::require_finite(x, "student_t_pdf");
  const double nu = dof.value();
  const double log_norm =
      log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

namespace detail {

// P(T > t) for t >= 0.
inline double student_t_upper_tail(double t, double nu) {
  const double t2 = t * t;
  const double denom = nu + t2;
  const double x = nu / denom;
  const double one_minus_x = t2 / denom;
  const double a = 0.5 * nu;
  const double b = 0.5;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return 0.5 * regularized_incomplete_beta(a, b, x, one_minus_x);
  }
  // Central region: P(|T| < t) = I_{t^2/(nu+t^2)}(1/2, nu/2).
  return 0.5 * (1.0 - regularized_incomplete_beta(b, a, one_minus_x, x));
}

}  // namespace detail

/// Student-t CDF through the regularized incomplete beta. Negative arguments go
/// through the upper tail by symmetry.
inline double student_t_cdf(double x, DegreesOfFreedom dof) {
  detail::require_finite(x, "student_t_cdf");
  if (x == 0.0) return 0.5;
  const double tail = detail::student_t_upper_tail(std::fabs(x), dof.value());
  return x > 0.0 ? 1.0 - tail : tail;
}

/// Inverse Student-t CDF on (0, 1); Newton iterations from a bracketing start.
inline double student_t_quantile(double p, DegreesOfFreedom dof) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("student_t_quantile: probability must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;  // target P(T > t), t > 0
  // Bracket [lo, hi] on t > 0 with P(T > lo) >= tail >= P(T > hi).
  double lo = 0.0;
  double hi = 1.0;
  while (detail::student_t_upper_tail(hi, dof.value()) > tail) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NonConvergenceError("student_t_quantile: bracket search failed");
  }
  double t = std::max(lo, std::min(hi, std::fabs(std_normal_quantile(tail))));
  for (int it = 0; it < 200; ++it) {
    const double f = detail::student_t_upper_tail(t, dof.value()) - tail;
    if (f > 0.0) lo = t; else hi = t;
    const double step = f / student_t_pdf(t, dof);  // d/dt P(T>t) = -pdf
    double next = t + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-15 * std::max(1.0, std::fabs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return upper ? t : -t;
}

/// ||Z||_p = (E|Z|^p)^{1/p} for Z ~ N(0, 1).
inline double lp_norm_std_normal(double p) {
  detail::require_finite(p, "lp_norm_std_normal");
  if (!(p > 1.0)) {
    throw DomainError("lp_norm_std_normal: requires p > 1");
  }
  const double log_moment =
      0.5 * p * std::numbers::ln2 + log_gamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

}  // namespace gmd
