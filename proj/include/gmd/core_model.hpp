#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmd/errors.hpp"
#include "gmd/special_functions.hpp"

namespace gmd {

/// Dense row-major matrix; only as much as the pairwise formulas and the
/// Cholesky sampler need.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DomainError("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class FamilyKind { Normal, StudentT };

/// Generator of the elliptical law: normal, or Student-t with nu degrees of
/// freedom. `nu` is unused for the normal family.
struct Family {
  FamilyKind kind = FamilyKind::Normal;
  double nu = 0.0;

  static Family normal() { return {FamilyKind::Normal, 0.0}; }
  static Family student_t(double nu) { return {FamilyKind::StudentT, nu}; }

  bool is_normal() const noexcept { return kind == FamilyKind::Normal; }
  bool is_student() const noexcept { return kind == FamilyKind::StudentT; }
  DegreesOfFreedom dof() const { return DegreesOfFreedom(nu); }

  std::string name() const { return is_normal() ? "normal" : "student-t"; }

  bool operator==(const Family&) const = default;
};

/// X ~ EC_n(mu, Sigma, g): location vector, scale matrix and generator.
struct DistributionSpec {
  Family family;
  std::vector<double> mu;
  Matrix sigma;

  bool operator==(const DistributionSpec&) const = default;
};

/// Which moments the caller is about to use; validation fails early when they
/// do not exist.
enum class MomentRequirement { None, Mean, Variance };

class ValidatedSpec;
ValidatedSpec validate(const DistributionSpec& spec,
                       MomentRequirement need = MomentRequirement::None);

/// A DistributionSpec whose invariants have been checked, together with the
/// lower Cholesky factor of its scale matrix. Immutable.
class ValidatedSpec {
public:
  const DistributionSpec& spec() const noexcept { return spec_; }
  const Family& family() const noexcept { return spec_.family; }
  const std::vector<double>& mu() const noexcept { return spec_.mu; }
  const Matrix& sigma() const noexcept { return spec_.sigma; }
  const Matrix& cholesky() const noexcept { return chol_; }
  std::size_t dimension() const noexcept { return spec_.mu.size(); }

private:
  ValidatedSpec(DistributionSpec spec, Matrix chol)
      : spec_(std::move(spec)), chol_(std::move(chol)) {}
  friend ValidatedSpec validate(const DistributionSpec&, MomentRequirement);

  DistributionSpec spec_;
  Matrix chol_;
};

namespace detail {

// Lower-triangular L with L L^T = a; nullopt if a pivot falls below the floor.
inline std::optional<Matrix> cholesky_lower(const Matrix& a, double pivot_floor) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace detail

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPivotFloor = 1e-12;
inline constexpr double kRhoClampSlack = 1e-12;

/// Checks every invariant and reports all violations at once.
inline ValidatedSpec validate(const DistributionSpec& spec, MomentRequirement need) {
  std::vector<std::string> errors;
  const std::size_t n = spec.mu.size();
  if (n < 2) {
    errors.push_back("dimension must be at least 2 (got " + std::to_string(n) + ")");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(spec.mu[i])) {
      errors.push_back("mu[" + std::to_string(i) + "] is not finite");
    }
  }
  bool shape_ok = spec.sigma.rows() == n && spec.sigma.cols() == n;
  if (!shape_ok) {
    errors.push_back("sigma must be " + std::to_string(n) + "x" + std::to_string(n) +
                     " to match mu (got " + std::to_string(spec.sigma.rows()) + "x" +
                     std::to_string(spec.sigma.cols()) + ")");
  }
  if (spec.family.is_student()) {
    const double nu = spec.family.nu;
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      errors.push_back("nu must be finite and > 0 (got " + std::to_string(nu) + ")");
    } else if (need == MomentRequirement::Mean && nu <= 1.0) {
      errors.push_back("moment nonexistence: the mean (and GMD) requires nu > 1 (got " +
                       std::to_string(nu) + ")");
    } else if (need == MomentRequirement::Variance && nu <= 2.0) {
      errors.push_back("moment nonexistence: the variance requires nu > 2 (got " +
                       std::to_string(nu) + ")");
    }
  }
  std::optional<Matrix> chol;
  if (shape_ok && n > 0) {
    bool finite = true;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) finite = finite && std::isfinite(spec.sigma(i, j));
      max_diag = std::max(max_diag, std::fabs(spec.sigma(i, i)));
    }
    if (!finite) {
      errors.push_back("sigma has non-finite entries");
    } else {
      bool symmetric = true;
      for (std::size_t i = 0; i < n && symmetric; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double a = spec.sigma(i, j);
          const double b = spec.sigma(j, i);
          if (std::fabs(a - b) > kSymmetryTolerance * std::max({std::fabs(a), std::fabs(b), max_diag})) {
            errors.push_back("sigma is not symmetric at (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
            symmetric = false;
            break;
          }
        }
      }
      if (symmetric) {
        chol = detail::cholesky_lower(spec.sigma, kPivotFloor * max_diag);
        if (!chol) errors.push_back("sigma is not positive definite");
      }
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return ValidatedSpec(spec, std::move(*chol));
}

/// The (mu_i, mu_j, sigma_i, sigma_j, rho_ij) slice that drives every pairwise
/// formula. For the Student-t family sigma is the scale, sqrt(Sigma_kk).
struct PairParams {
  double mu_i = 0.0;
  double mu_j = 0.0;
  double sigma_i = 1.0;
  double sigma_j = 1.0;
  double rho = 0.0;

  PairParams swapped() const { return {mu_j, mu_i, sigma_j, sigma_i, rho}; }

  /// sigma_i^2 + sigma_j^2 - 2 sigma_i sigma_j rho, clipped at zero.
  double difference_variance() const {
    const double v = sigma_i * sigma_i + sigma_j * sigma_j - 2.0 * sigma_i * sigma_j * rho;
    return std::max(0.0, v);
  }
  double difference_scale() const { return std::sqrt(difference_variance()); }

  /// X_i = X_j almost surely.
  bool degenerate() const noexcept { return rho == 1.0 && sigma_i == sigma_j && mu_i == mu_j; }

  void check() const {
    if (!std::isfinite(mu_i) || !std::isfinite(mu_j)) throw DomainError("pair means must be finite");
    if (!(sigma_i > 0.0) || !(sigma_j > 0.0) || !std::isfinite(sigma_i) || !std::isfinite(sigma_j)) {
      throw DomainError("pair scales must be finite and positive");
    }
    if (!(std::fabs(rho) <= 1.0)) throw DomainError("pair correlation must lie in [-1, 1]");
  }

  bool operator==(const PairParams&) const = default;
};

/// Pair slice of a validated spec. Indices are zero-based and must differ; the
/// (j, i) slice is the (i, j) slice with fields exchanged.
inline PairParams pair_params(const ValidatedSpec& spec, std::size_t i, std::size_t j) {
  const std::size_t n = spec.dimension();
  if (i >= n || j >= n) {
    throw DomainError("pair index out of range (n = " + std::to_string(n) + ")");
  }
  if (i == j) throw DomainError("pair indices must differ");
  const Matrix& s = spec.sigma();
  const double si = std::sqrt(s(i, i));
  const double sj = std::sqrt(s(j, j));
  double rho = s(i, j) / (si * sj);
  if (std::fabs(rho) > 1.0) {
    if (std::fabs(rho) - 1.0 > kRhoClampSlack) {
      throw DomainError("correlation outside [-1, 1] beyond rounding");
    }
    rho = std::copysign(1.0, rho);
  }
  return {spec.mu()[i], spec.mu()[j], si, sj, rho};
}

/// Cached pairwise constants. tau and lambda are absent when |rho| = 1.
struct PairDerived {
  double c_ij = 0.0;
  std::optional<double> tau_ij;
  std::optional<double> lambda_ij;
  double r_ij = 0.5;
  bool degenerate = false;
};

/// c_ij = sqrt(1 - rho^2 + (sigma_j/sigma_i - rho)^2), so that
/// sigma_i * c_ij is the standard deviation (scale) of X_i - X_j.
inline double pair_c(const PairParams& p) {
  const double ratio = p.sigma_j / p.sigma_i - p.rho;
  return std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho) + ratio * ratio);
}

/// R_ij = P(X_i <= X_j). X_j - X_i has the same one-dimensional generator as
/// the family, so this is the family CDF at (mu_j - mu_i) / scale(X_j - X_i).
inline double reliability_closed(const PairParams& p, const Family& family) {
  const double s = p.difference_scale();
  const double diff = p.mu_j - p.mu_i;
  if (s == 0.0) {
    if (diff > 0.0) return 1.0;
    if (diff < 0.0) return 0.0;
    return 0.5;  // X_i = X_j a.s.; split the tie evenly
  }
  const double a = diff / s;
  return family.is_normal() ? std_normal_cdf(a) : student_t_cdf(a, family.dof());
}

inline PairDerived pair_derived(const PairParams& p, const Family& family) {
  p.check();
  PairDerived d;
  d.degenerate = p.degenerate();
  d.c_ij = pair_c(p);
  const double one_minus_rho2 = 1.0 - p.rho * p.rho;
  if (one_minus_rho2 > 0.0) {
    const double root = std::sqrt(one_minus_rho2);
    d.tau_ij = (p.mu_j - p.mu_i) / (p.sigma_i * root);
    d.lambda_ij = (p.sigma_j / p.sigma_i - p.rho) / root;
  }
  d.r_ij = reliability_closed(p, family);
  return d;
}

enum class Method { ClosedForm, Quadrature, MonteCarlo, Quantile };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "ClosedForm";
    case Method::Quadrature: return "Quadrature";
    case Method::MonteCarlo: return "MonteCarlo";
    case Method::Quantile: return "Quantile";
  }
  return "Unknown";
}

struct PairContribution {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

/// GMD_n with its per-pair E|X_i - X_j| terms. `value` is the average of the
/// pair terms over all C(n, 2) pairs.
struct GmdResult {
  double value = 0.0;
  Method method = Method::ClosedForm;
  std::vector<PairContribution> pair_contributions;
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::string> labels;

  static GmdResult from_pairs(Method method, std::vector<PairContribution> pairs) {
    if (pairs.empty()) throw DomainError("GmdResult needs at least one pair");
    GmdResult r;
    r.method = method;
    double sum = 0.0;
    for (const auto& c : pairs) sum += c.value;
    r.value = std::max(0.0, sum / static_cast<double>(pairs.size()));
    r.pair_contributions = std::move(pairs);
    return r;
  }
};

/// Visits (i, j) for 0 <= i < j < n in lexicographic order.
template <class F>
void for_each_pair(std::size_t n, F&& f) {
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) f(i, j);
  }
}

inline double binomial2(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace gmd
