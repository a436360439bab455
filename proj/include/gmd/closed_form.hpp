#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gmd/core_model.hpp"
#include "gmd/quadrature.hpp"
#include "gmd/special_functions.hpp"

namespace gmd {

namespace detail {

// One bracket of the pairwise closed form, oriented (i, j):
//   (sigma_j/c_ij)(sigma_j/sigma_i - rho) * k(delta) * pdf(delta/c_ij)
//     + mu_j cdf(delta/c_ij) - mu_j/2,
// with delta = (mu_j - mu_i)/sigma_i. Note the sigma_i (not sigma_j) in the
// denominator of delta. `k` is 1 for the normal law and
// (nu/(nu-1))(1 + delta^2/(nu c^2)) for Student-t.
template <class Pdf, class Cdf, class Kernel>
double oriented_bracket(const PairParams& p, Pdf pdf, Cdf cdf, Kernel kernel) {
  const double c = pair_c(p);
  const double delta = (p.mu_j - p.mu_i) / p.sigma_i;
  const double arg = delta / c;
  return (p.sigma_j / c) * (p.sigma_j / p.sigma_i - p.rho) * kernel(delta, c) * pdf(arg) +
         p.mu_j * cdf(arg) - 0.5 * p.mu_j;
}

// Pairs with zero-scale difference: X_j - X_i is the constant mu_j - mu_i.
inline bool constant_difference(const PairParams& p) { return pair_c(p) == 0.0; }

}  // namespace detail

/// E|X_i - X_j| for a bivariate normal pair.
inline double normal_pair_gmd(const PairParams& p) {
  p.check();
  if (detail::constant_difference(p)) return std::fabs(p.mu_i - p.mu_j);
  auto unit = [](double, double) { return 1.0; };
  auto pdf = [](double x) { return std_normal_pdf(x); };
  auto cdf = [](double x) { return std_normal_cdf(x); };
  const double v = 2.0 * detail::oriented_bracket(p, pdf, cdf, unit) +
                   2.0 * detail::oriented_bracket(p.swapped(), pdf, cdf, unit);
  return std::max(0.0, v);
}

/// E|X_i - X_j| for a bivariate Student-t pair with nu > 1.
inline double student_pair_gmd(const PairParams& p, DegreesOfFreedom dof) {
  dof.require_mean();
  p.check();
  if (detail::constant_difference(p)) return std::fabs(p.mu_i - p.mu_j);
  const double nu = dof.value();
  auto kernel = [nu](double delta, double c) {
    return (nu / (nu - 1.0)) * (1.0 + delta * delta / (nu * c * c));
  };
  auto pdf = [dof](double x) { return student_t_pdf(x, dof); };
  auto cdf = [dof](double x) { return student_t_cdf(x, dof); };
  const double v = 2.0 * detail::oriented_bracket(p, pdf, cdf, kernel) +
                   2.0 * detail::oriented_bracket(p.swapped(), pdf, cdf, kernel);
  return std::max(0.0, v);
}

namespace detail {

template <class PairFn>
GmdResult pairwise_result(const ValidatedSpec& spec, PairFn pair_fn) {
  std::vector<PairContribution> pairs;
  std::size_t degenerate = 0;
  for_each_pair(spec.dimension(), [&](std::size_t i, std::size_t j) {
    const PairParams p = pair_params(spec, i, j);
    if (p.degenerate()) ++degenerate;
    pairs.push_back({i, j, pair_fn(p)});
  });
  auto r = GmdResult::from_pairs(Method::ClosedForm, std::move(pairs));
  r.diagnostics["degenerate_pairs"] = static_cast<double>(degenerate);
  return r;
}

}  // namespace detail

inline GmdResult normal_gmd(const ValidatedSpec& spec) {
  if (!spec.family().is_normal()) throw DomainError("normal_gmd: spec is not of the normal family");
  return detail::pairwise_result(spec, [](const PairParams& p) { return normal_pair_gmd(p); });
}

inline GmdResult student_gmd(const ValidatedSpec& spec) {
  if (!spec.family().is_student()) throw DomainError("student_gmd: spec is not of the Student-t family");
  const DegreesOfFreedom dof = spec.family().dof();
  dof.require_mean();
  auto r = detail::pairwise_result(spec, [dof](const PairParams& p) { return student_pair_gmd(p, dof); });
  r.diagnostics["nu"] = dof.value();
  return r;
}

/// Closed form for whichever family the spec carries.
inline GmdResult closed_form_gmd(const ValidatedSpec& spec) {
  return spec.family().is_normal() ? normal_gmd(spec) : student_gmd(spec);
}

namespace detail {

inline double mean_sqrt_one_minus(std::span<const double> rhos) {
  if (rhos.empty()) throw DomainError("exchangeable GMD: empty pair list");
  double sum = 0.0;
  for (double r : rhos) {
    if (!(std::fabs(r) <= 1.0)) throw DomainError("exchangeable GMD: |rho| must be <= 1");
    sum += std::sqrt(std::max(0.0, 1.0 - r));
  }
  return sum / static_cast<double>(rhos.size());
}

}  // namespace detail

/// (2/sqrt(pi)) sigma_1 avg sqrt(1 - rho_ij) for pairs sharing mean and scale.
inline double exchangeable_normal_gmd(double sigma1, std::span<const double> rhos) {
  if (!(sigma1 > 0.0)) throw DomainError("exchangeable_normal_gmd: sigma1 must be positive");
  return 2.0 * std::numbers::inv_sqrtpi * sigma1 * detail::mean_sqrt_one_minus(rhos);
}

/// sqrt(2 nu) Gamma((nu+1)/2) / ((nu - 1) Gamma(nu/2)); tends to sqrt(2) as nu grows.
inline double student_exchangeable_factor(DegreesOfFreedom dof) {
  dof.require_mean();
  const double nu = dof.value();
  return std::sqrt(2.0 * nu) * std::exp(log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu)) /
         (nu - 1.0);
}

inline double exchangeable_student_gmd(double sigma1, DegreesOfFreedom dof,
                                       std::span<const double> rhos) {
  if (!(sigma1 > 0.0)) throw DomainError("exchangeable_student_gmd: sigma1 must be positive");
  return 2.0 * std::numbers::inv_sqrtpi * sigma1 * student_exchangeable_factor(dof) *
         detail::mean_sqrt_one_minus(rhos);
}

/// Quantile function F^{-1} on (0, 1) of a law whose mean exists.
struct QuantileFunction {
  std::function<double(double)> eval;
  bool mean_exists = true;

  /// Nondecreasing on an interior grid of `points` values.
  bool monotone_on_grid(int points = 1000) const {
    double prev = eval(0.5 / points);
    for (int k = 1; k < points; ++k) {
      const double cur = eval((k + 0.5) / points);
      if (cur < prev) return false;
      prev = cur;
    }
    return true;
  }
};

inline QuantileFunction uniform_quantile(double a = 0.0, double b = 1.0) {
  if (!(b > a)) throw DomainError("uniform_quantile: requires b > a");
  return {[a, b](double u) { return a + (b - a) * u; }, true};
}

inline QuantileFunction exponential_quantile(double rate = 1.0) {
  if (!(rate > 0.0)) throw DomainError("exponential_quantile: rate must be positive");
  return {[rate](double u) { return -std::log1p(-u) / rate; }, true};
}

inline QuantileFunction normal_quantile(double mu = 0.0, double sigma = 1.0) {
  if (!(sigma > 0.0)) throw DomainError("normal_quantile: sigma must be positive");
  return {[mu, sigma](double u) { return mu + sigma * std_normal_quantile(u); }, true};
}

inline QuantileFunction student_quantile(double mu, double sigma, DegreesOfFreedom dof) {
  if (!(sigma > 0.0)) throw DomainError("student_quantile: sigma must be positive");
  return {[mu, sigma, dof](double u) { return mu + sigma * student_t_quantile(u, dof); },
          dof.has_mean()};
}

struct QuantileGmdOptions {
  QuadratureConfig quadrature{};
  /// Inner truncation of (0, 1); the integral is also evaluated at
  /// 100 * epsilon and the two are extrapolated linearly in the cut-off.
  double epsilon = 1e-12;
  /// |I(eps) - I(100 eps)| above this (relative to max(1, |I|)) means the
  /// endpoint mass is not vanishing: the integral diverges.
  double divergence_threshold = 1e-6;
};

/// Classical GMD of an i.i.d. sequence, E|X_1 - X_2| = 2 * integral of
/// (2u - 1) F^{-1}(u) over (0, 1). The integral alone is E max - E X_1.
inline double quantile_gmd(const QuantileFunction& q, const QuantileGmdOptions& opt = {}) {
  if (!q.eval) throw DomainError("quantile_gmd: empty quantile function");
  if (!q.mean_exists) throw MomentError("quantile_gmd: the mean does not exist");
  const double eps_fine = opt.epsilon;
  const double eps_coarse = 100.0 * opt.epsilon;
  auto integrand = [&](double u) { return (2.0 * u - 1.0) * q.eval(u); };
  const QuadratureConfig& cfg = opt.quadrature;
  const double core = integrate(integrand, eps_coarse, 0.5, cfg).value +
                      integrate(integrand, 0.5, 1.0 - eps_coarse, cfg).value;
  const double edges = integrate(integrand, eps_fine, eps_coarse, cfg).value +
                       integrate(integrand, 1.0 - eps_coarse, 1.0 - eps_fine, cfg).value;
  const double coarse = core;
  const double fine = core + edges;
  if (std::fabs(fine - coarse) > opt.divergence_threshold * std::max(1.0, std::fabs(fine))) {
    throw NonConvergenceError("quantile_gmd: endpoint contributions do not vanish; integral diverges",
                              fine, std::fabs(fine - coarse));
  }
  // Richardson step assuming the truncation error is linear in the cut-off.
  const double extrapolated = fine + (fine - coarse) * eps_fine / (eps_coarse - eps_fine);
  return std::max(0.0, 2.0 * extrapolated);
}

/// G = GMD / (2 mu_1). Meaningful as an inequality index only for nonnegative
/// variables; callers with mu_1 < 0 should flag the result.
inline double gini_index(double gmd, double mu1) {
  if (mu1 == 0.0) throw DomainError("gini_index: mean must be nonzero");
  return gmd / (2.0 * mu1);
}

/// Equivalent form mu_G1 / mu_1 - 1, with mu_G1 the mean of the
/// skew-symmetric law 2 f F (so GMD = 2 (mu_G1 - mu_1)).
inline double gini_index_from_skew_mean(double mu_g1, double mu1) {
  if (mu1 == 0.0) throw DomainError("gini_index: mean must be nonzero");
  return mu_g1 / mu1 - 1.0;
}

}  // namespace gmd
