#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gmd {

/// Argument outside the documented domain of a function (non-finite input,
/// nu <= 0, p <= 1, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A requested moment does not exist for the distribution (e.g. the mean of a
/// Student-t law with nu <= 1).
class MomentError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Adaptive quadrature or an iterative special function ran out of budget.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, double estimate = 0.0, double abs_error = 0.0)
      : std::runtime_error(what), estimate_(estimate), abs_error_(abs_error) {}

  double estimate() const noexcept { return estimate_; }
  double abs_error() const noexcept { return abs_error_; }

private:
  double estimate_;
  double abs_error_;
};

/// Carries every violated invariant of a distribution specification, not just
/// the first one found.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid distribution specification";
    for (const auto& e : errors) {
      out += "; ";
      out += e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

}  // namespace gmd
