#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gmd/bounds.hpp"
#include "gmd/closed_form.hpp"
#include "support/oracles.hpp"

namespace gmd {
namespace {

TEST(PairVarianceBound, PairExamples) {
  EXPECT_NEAR(theorem1_pair_bound({0, 0, 1, 1, 0}), std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(theorem1_pair_bound({0, 0, 1, 1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(theorem1_pair_bound({0, 3, 1, 1, 0}), std::numbers::sqrt2 + 3.0, 1e-15);
  EXPECT_NEAR(theorem1_pair_bound({0, 0, 2, 1, -0.5}), std::sqrt(4.0 + 1.0 + 2.0), 1e-14);
}

TEST(PairVarianceBound, SwapInvariant) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto p = testing::random_pair(rng);
    EXPECT_NEAR(theorem1_pair_bound(p), theorem1_pair_bound(p.swapped()), 1e-13);
  }
}

TEST(PairVarianceBound, DominatesExactOnRandomNormalSpecs) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 500; ++k) {
    const auto spec = validate(testing::random_spec(rng, 2 + k % 5, Family::normal()));
    auto report = bound_report(spec);
    report.exact_gmd = normal_gmd(spec).value;
    EXPECT_TRUE(report.dominated(1e-9)) << k;
    EXPECT_LE(*report.exact_gmd, *report.theorem1 + 1e-9);
  }
}

TEST(PairVarianceBound, StudentNeedsVariance) {
  const auto t2 = validate(testing::exchangeable_spec(3, 0, 1, 0.2, Family::student_t(2.0)));
  EXPECT_THROW(theorem1_bound(t2), MomentError);
  const auto report = bound_report(t2);
  EXPECT_FALSE(report.theorem1.has_value());
  EXPECT_FALSE(report.sqrt_one_minus_rho.has_value());

  const auto t5 = validate(testing::exchangeable_spec(3, 0, 1, 0.2, Family::student_t(5.0)));
  const auto r5 = bound_report(t5);
  ASSERT_TRUE(r5.theorem1.has_value());
  EXPECT_GE(*r5.theorem1, student_gmd(t5).value);
  EXPECT_NEAR(*r5.theorem1, std::sqrt(5.0 / 3.0) * std::sqrt(2.0 * 0.8), 1e-13);
}

TEST(ExchangeableBound, RatioToExactIsSqrtTwoOverPi) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 5;
    const double lo = -1.0 / (n - 1.0);
    const double rho = lo + (0.98 - lo) * u(rng) + 1e-3;
    const auto spec = validate(testing::exchangeable_spec(n, 4 * u(rng) - 2, 0.5 + 2 * u(rng), rho, Family::normal()));
    const auto report = bound_report(spec);
    ASSERT_TRUE(report.sqrt_one_minus_rho.has_value());
    EXPECT_NEAR(normal_gmd(spec).value / *report.sqrt_one_minus_rho, std::sqrt(2.0 / std::numbers::pi), 1e-9);
  }
}

TEST(ExchangeableBound, HypothesesGateFields) {
  const auto iid = validate(testing::exchangeable_spec(2, 0, 1, 0.0, Family::normal()));
  const auto r = bound_report(iid);
  ASSERT_TRUE(r.gmd2_sqrt2 && r.cp_bound && r.sqrt_one_minus_rho);
  EXPECT_NEAR(*r.gmd2_sqrt2, std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(*r.sqrt_one_minus_rho, std::numbers::sqrt2, 1e-15);
  EXPECT_LT(r.cp_bound->value, 2.0 / std::sqrt(3.0));

  const auto corr = validate(testing::exchangeable_spec(3, 0, 1, 0.3, Family::normal()));
  const auto rc = bound_report(corr);
  EXPECT_FALSE(rc.gmd2_sqrt2.has_value());
  EXPECT_FALSE(rc.cp_bound.has_value());

  const auto unequal = validate({Family::normal(), {0.0, 1.0}, Matrix::identity(2)});
  EXPECT_FALSE(bound_report(unequal).sqrt_one_minus_rho.has_value());
  EXPECT_THROW(exchangeable_rho_bound(1.0, {}), DomainError);
}

TEST(CpConstant, KnownValues) {
  EXPECT_NEAR(cp_constant(2.0), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(cp_constant(1.5), 1.1394337907428044, 1e-12);
  const double gamma_form = std::pow(gamma_fn(0.25), 2.0 / 3.0) / (std::numbers::sqrt2 * std::cbrt(std::numbers::pi));
  EXPECT_NEAR(cp_constant(1.5), gamma_form, 1e-12);
  EXPECT_LT(cp_constant(1.5), cp_constant(2.0));
  EXPECT_THROW(cp_constant(1.0), DomainError);
  EXPECT_THROW(cp_bound(1.5, 0.0), DomainError);
  EXPECT_NEAR(cp_bound(1.5, 3.0), 3.0 * cp_constant(1.5), 1e-14);
}

TEST(CpConstant, QuadratureNormProviderAgrees) {
  LpNormProvider by_quadrature = [](double p) {
    auto f = [p](double z) { return std::pow(z, p) * std_normal_pdf(z); };
    return std::pow(2.0 * integrate_tail(f, 0.0, 1.0, +1).value, 1.0 / p);
  };
  EXPECT_NEAR(cp_constant(1.5, by_quadrature), cp_constant(1.5), 1e-10);
}

TEST(CpConstant, GridMinimizerIsInterior) {
  const auto best = minimize_cp_constant(1000);
  EXPECT_GT(best.p, 1.0);
  EXPECT_LT(best.p, 2.0);
  EXPECT_LE(best.value, cp_constant(1.5));
  // Every C_p stays above the exact iid value 2/sqrt(pi).
  EXPECT_GT(best.value, 2.0 / std::sqrt(std::numbers::pi));
  EXPECT_THROW(minimize_cp_constant(1), DomainError);
}

}  // namespace
}  // namespace gmd
