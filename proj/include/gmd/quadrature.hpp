#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gmd/errors.hpp"

namespace gmd {

/// How the real line (or a half line) is mapped onto a finite interval.
enum class InfiniteTransform {
  /// x = center + scale * tan(theta), theta in (-pi/2, pi/2).
  Tangent,
  /// Finite core [center - split*scale, center + split*scale] plus two tails
  /// mapped by x = edge +/- scale * (u^{-q} - 1), u in (0, 1]. A tail power
  /// q = 1/(nu - 1) flattens integrands decaying like |x|^{-nu}.
  AlgebraicTails,
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  InfiniteTransform transform = InfiniteTransform::Tangent;
  double split = 10.0;
  double tail_power = 1.0;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw DomainError("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 10) {
      throw DomainError("max_subdivisions must be at least 10");
    }
    if (!(split > 0.0) || !(tail_power >= 1.0)) {
      throw DomainError("quadrature split must be positive and tail_power >= 1");
    }
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;

  QuadratureResult& operator+=(const QuadratureResult& other) {
    value += other.value;
    abs_error += other.abs_error;
    subdivisions += other.subdivisions;
    evaluations += other.evaluations;
    return *this;
  }
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kGK15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kGK15Weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kG7Weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double res_gauss = f_center * kG7Weights[3];
  double res_kronrod = f_center * kGK15Weights[7];
  double res_abs = std::fabs(res_kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kGK15Nodes[k];
    f1[k] = f(center - dx);
    f2[k] = f(center + dx);
    const double sum = f1[k] + f2[k];
    res_kronrod += kGK15Weights[k] * sum;
    res_abs += kGK15Weights[k] * (std::fabs(f1[k]) + std::fabs(f2[k]));
    if (k % 2 == 1) res_gauss += kG7Weights[k / 2] * sum;
  }
  const double mean = 0.5 * res_kronrod;
  double res_asc = kGK15Weights[7] * std::fabs(f_center - mean);
  for (std::size_t k = 0; k < 7; ++k) {
    res_asc += kGK15Weights[k] * (std::fabs(f1[k] - mean) + std::fabs(f2[k] - mean));
  }
  const double scale = std::fabs(half);
  const double result = res_kronrod * half;
  res_abs *= scale;
  res_asc *= scale;
  double err = std::fabs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > uflow / (50.0 * epmach)) {
    err = std::max(epmach * 50.0 * res_abs, err);
  }
  return {a, b, result, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval. The
/// segment with the largest error estimate is bisected until
/// error <= max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: finite limits required; use integrate_real_line for infinite ones");
  }
  if (a == b) return {};
  auto by_error = [](const detail::Segment& x, const detail::Segment& y) {
    return x.error < y.error;
  };
  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + 1);
  heap.push_back(detail::gauss_kronrod_15(f, a, b));
  double value = heap.front().value;
  double error = heap.front().error;
  int evaluations = 15;
  int subdivisions = 1;
  auto converged = [&] {
    return error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(value));
  };
  while (!converged()) {
    if (subdivisions >= cfg.max_subdivisions) {
      throw NonConvergenceError("adaptive quadrature exhausted " +
                                    std::to_string(cfg.max_subdivisions) +
                                    " subdivisions (estimate " + std::to_string(value) +
                                    ", error " + std::to_string(error) + ")",
                                value, error);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      throw NonConvergenceError("adaptive quadrature reached machine resolution", value, error);
    }
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    evaluations += 30;
    ++subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  // Re-sum to drop the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (const auto& s : heap) {
    value += s.value;
    error += s.error;
  }
  return {value, error, subdivisions, evaluations};
}

/// Integral of f over [edge, +inf) (direction = +1) or (-inf, edge]
/// (direction = -1) via x = edge +/- scale * (u^{-q} - 1).
template <class F>
QuadratureResult integrate_tail(F&& f, double edge, double scale, int direction,
                                const QuadratureConfig& cfg = {}) {
  const double q = cfg.tail_power;
  const double sign = direction >= 0 ? 1.0 : -1.0;
  auto mapped = [&](double u) {
    const double w = std::pow(u, -q);
    const double x = edge + sign * scale * (w - 1.0);
    if (!std::isfinite(x)) return 0.0;
    const double jac = scale * q * w / u;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * jac;
  };
  return integrate(mapped, 0.0, 1.0, cfg);
}

/// Integral of f over the real line. `center` and `scale` locate the bulk of
/// the integrand; the transform in `cfg` maps the line to finite intervals.
template <class F>
QuadratureResult integrate_real_line(F&& f, double center, double scale,
                                     const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (!(scale > 0.0) || !std::isfinite(center)) {
    throw DomainError("integrate_real_line: scale must be positive and center finite");
  }
  if (cfg.transform == InfiniteTransform::Tangent) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    auto mapped = [&](double theta) {
      const double t = std::tan(theta);
      const double x = center + scale * t;
      if (!std::isfinite(x)) return 0.0;
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx * scale * (1.0 + t * t);
    };
    return integrate(mapped, -half_pi, half_pi, cfg);
  }
  const double lo = center - cfg.split * scale;
  const double hi = center + cfg.split * scale;
  QuadratureResult total = integrate(f, lo, hi, cfg);
  total += integrate_tail(f, hi, scale, +1, cfg);
  total += integrate_tail(f, lo, scale, -1, cfg);
  return total;
}

}  // namespace gmd
