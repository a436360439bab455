#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gmd/quadrature.hpp"

namespace gmd {
namespace {

TEST(Quadrature, PolynomialsAreExact) {
  const auto r = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, 9.0 - 3.0 + 3.0, 1e-13);
  EXPECT_EQ(r.subdivisions, 1);
}

TEST(Quadrature, EmptyAndReversedIntervals) {
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
  EXPECT_NEAR(integrate([](double x) { return x; }, 1.0, 0.0).value, -0.5, 1e-15);
}

TEST(Quadrature, EndpointSingularityNeedsSubdivision) {
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
  EXPECT_GT(r.subdivisions, 1);
}

TEST(Quadrature, GaussianOverRealLineBothTransforms) {
  auto f = [](double x) { return std::exp(-0.5 * (x - 3) * (x - 3) / 4.0); };
  const double want = std::sqrt(2 * std::numbers::pi) * 2.0;
  QuadratureConfig cfg;
  EXPECT_NEAR(integrate_real_line(f, 3.0, 2.0, cfg).value, want, 1e-10);
  cfg.transform = InfiniteTransform::AlgebraicTails;
  EXPECT_NEAR(integrate_real_line(f, 3.0, 2.0, cfg).value, want, 1e-10);
}

TEST(Quadrature, HeavyTailWithAlgebraicMap) {
  // x |x|^{-2.5} tail: integral of 1.5 x^{-2.5} over [1, inf) is 1.
  QuadratureConfig cfg;
  cfg.tail_power = 1.0 / 1.5;
  cfg.tail_power = std::max(1.0, cfg.tail_power);
  const auto r = integrate_tail([](double x) { return 1.5 * std::pow(x, -2.5); }, 1.0, 1.0, +1, cfg);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  cfg.tail_power = 1.0 / 0.3;  // integrand x^{-1.3}: flattened by q = 1/0.3
  const auto slow = integrate_tail([](double x) { return 0.3 * std::pow(x, -1.3); }, 1.0, 1.0, +1, cfg);
  EXPECT_NEAR(slow.value, 1.0, 1e-9);
}

TEST(Quadrature, NonConvergenceIsReported) {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 10;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / x) / x; }, 1e-6, 1.0, cfg), NonConvergenceError);
}

TEST(Quadrature, ConfigValidation) {
  QuadratureConfig cfg;
  cfg.abs_tol = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.max_subdivisions = 9;
  EXPECT_THROW(cfg.validate(), DomainError);
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, INFINITY), DomainError);
}

TEST(Quadrature, ErrorEstimateIsHonest) {
  const auto r = integrate([](double x) { return std::exp(x) * std::cos(5 * x); }, 0.0, 3.0);
  const double exact = (std::exp(3.0) * (std::cos(15.0) + 5 * std::sin(15.0)) - 1.0) / 26.0;
  EXPECT_LE(std::fabs(r.value - exact), std::max(r.abs_error, 1e-14));
}

}  // namespace
}  // namespace gmd
