#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <utility>

#include "gmd/core_model.hpp"
#include "gmd/special_functions.hpp"

namespace gmd {

/// Upper bounds on GMD_n. Optional fields are absent when their hypotheses do
/// not hold for the spec at hand (no finite variance, unequal marginals, ...).
struct BoundReport {
  std::optional<double> theorem1;
  std::optional<double> sqrt_one_minus_rho;
  std::optional<double> gmd2_sqrt2;
  struct CpBound {
    double p = 2.0;
    double value = 0.0;
  };
  std::optional<CpBound> cp_bound;
  std::optional<double> exact_gmd;

  /// exact_gmd <= every present bound + slack. Trivially true without exact_gmd.
  bool dominated(double slack = 1e-9) const {
    if (!exact_gmd) return true;
    const double g = *exact_gmd;
    auto ok = [&](const std::optional<double>& b) { return !b || g <= *b + slack; };
    return ok(theorem1) && ok(sqrt_one_minus_rho) && ok(gmd2_sqrt2) &&
           (!cp_bound || g <= cp_bound->value + slack);
  }
};

/// sqrt(Var(X_i - X_j)) + |mu_i - mu_j|, written as in the pairwise bound:
/// sqrt((sigma_i - sigma_j rho)^2 + sigma_j^2 (1 - rho^2)). Here sigma is the
/// standard deviation.
inline double theorem1_pair_bound(const PairParams& p) {
  p.check();
  const double a = p.sigma_i - p.sigma_j * p.rho;
  const double radicand = a * a + p.sigma_j * p.sigma_j * (1.0 - p.rho * p.rho);
  return std::sqrt(std::max(0.0, radicand)) + std::fabs(p.mu_i - p.mu_j);
}

namespace detail {

// Multiplier turning the scale sqrt(Sigma_kk) into a standard deviation;
// nullopt when the variance is infinite.
inline std::optional<double> sd_factor(const Family& family) {
  if (family.is_normal()) return 1.0;
  const double nu = family.nu;
  if (nu <= 2.0) return std::nullopt;
  return std::sqrt(nu / (nu - 2.0));
}

inline PairParams to_moment_pair(PairParams p, double factor) {
  p.sigma_i *= factor;
  p.sigma_j *= factor;
  return p;
}

inline double sqrt_one_minus(double rho) { return std::sqrt(std::max(0.0, 1.0 - rho)); }

}  // namespace detail

/// Average of the pairwise bounds. Throws MomentError when the family has no
/// finite variance.
inline double theorem1_bound(const ValidatedSpec& spec) {
  const auto factor = detail::sd_factor(spec.family());
  if (!factor) spec.family().dof().require_variance();
  double sum = 0.0;
  for_each_pair(spec.dimension(), [&](std::size_t i, std::size_t j) {
    sum += theorem1_pair_bound(detail::to_moment_pair(pair_params(spec, i, j), *factor));
  });
  return sum / binomial2(spec.dimension());
}

/// sqrt(2) sigma_1 times the pair average of sqrt(1 - rho_ij), for variables
/// sharing mean and standard deviation sigma_1.
inline double exchangeable_rho_bound(double sigma1, std::span<const double> rhos) {
  if (rhos.empty()) throw DomainError("exchangeable_rho_bound: empty pair list");
  if (!(sigma1 > 0.0)) throw DomainError("exchangeable_rho_bound: sigma1 must be positive");
  double sum = 0.0;
  for (double r : rhos) {
    if (!(std::fabs(r) <= 1.0)) throw DomainError("exchangeable_rho_bound: |rho| must be <= 1");
    sum += detail::sqrt_one_minus(r);
  }
  return std::numbers::sqrt2 * sigma1 * sum / static_cast<double>(rhos.size());
}

using LpNormProvider = std::function<double(double)>;

/// C_p = 2 ||Z||_p ((p - 1)/(2p - 1))^{(p-1)/p}; Z standard normal unless
/// another L^p-norm provider is supplied.
inline double cp_constant(double p, const LpNormProvider& lp_norm = lp_norm_std_normal) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("cp_constant: requires p > 1");
  const double e = (p - 1.0) / p;
  return 2.0 * lp_norm(p) * std::pow((p - 1.0) / (2.0 * p - 1.0), e);
}

/// C_p sigma_1 for i.i.d. variables with standard deviation sigma_1.
inline double cp_bound(double p, double sigma1, const LpNormProvider& lp_norm = lp_norm_std_normal) {
  if (!(sigma1 > 0.0)) throw DomainError("cp_bound: sigma1 must be positive");
  return cp_constant(p, lp_norm) * sigma1;
}

/// Grid minimizer of C_p over p in (1, 2]. No analytic optimum is claimed.
inline BoundReport::CpBound minimize_cp_constant(int grid_points = 2000,
                                                 const LpNormProvider& lp_norm = lp_norm_std_normal) {
  if (grid_points < 2) throw DomainError("minimize_cp_constant: need at least 2 grid points");
  BoundReport::CpBound best{2.0, cp_constant(2.0, lp_norm)};
  for (int k = 1; k <= grid_points; ++k) {
    const double p = 1.0 + static_cast<double>(k) / grid_points;
    const double c = cp_constant(p, lp_norm);
    if (c < best.value) best = {p, c};
  }
  return best;
}

namespace detail {

inline bool common_marginals(const ValidatedSpec& spec) {
  const std::size_t n = spec.dimension();
  for (std::size_t k = 1; k < n; ++k) {
    if (spec.mu()[k] != spec.mu()[0] || spec.sigma()(k, k) != spec.sigma()(0, 0)) return false;
  }
  return true;
}

inline bool uncorrelated(const ValidatedSpec& spec) {
  bool zero = true;
  for_each_pair(spec.dimension(), [&](std::size_t i, std::size_t j) {
    zero = zero && spec.sigma()(i, j) == 0.0;
  });
  return zero;
}

}  // namespace detail

/// All bounds whose hypotheses hold for `spec`. The C_p bound needs i.i.d.
/// normal coordinates (uncorrelated jointly normal with common marginals).
inline BoundReport bound_report(const ValidatedSpec& spec) {
  BoundReport report;
  const auto factor = detail::sd_factor(spec.family());
  if (!factor) return report;
  report.theorem1 = theorem1_bound(spec);
  if (detail::common_marginals(spec)) {
    const double sigma1 = std::sqrt(spec.sigma()(0, 0)) * *factor;
    std::vector<double> rhos;
    for_each_pair(spec.dimension(),
                  [&](std::size_t i, std::size_t j) { rhos.push_back(pair_params(spec, i, j).rho); });
    report.sqrt_one_minus_rho = exchangeable_rho_bound(sigma1, rhos);
    if (detail::uncorrelated(spec)) {
      if (spec.dimension() == 2) report.gmd2_sqrt2 = std::numbers::sqrt2 * sigma1;
      if (spec.family().is_normal()) {
        auto best = minimize_cp_constant();
        report.cp_bound = BoundReport::CpBound{best.p, best.value * sigma1};
      }
    }
  }
  return report;
}

}  // namespace gmd
