#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gmd/closed_form.hpp"
#include "gmd/general_ec.hpp"
#include "support/oracles.hpp"

namespace gmd {
namespace {

const PairParams kStd{0, 0, 1, 1, 0};

TEST(Skewing, NormalExamples) {
  const auto pi = skewing_normal(kStd);
  EXPECT_EQ(pi(0.0), 0.5);
  EXPECT_NEAR(pi(1.0), std_normal_cdf(1.0), 1e-16);
  EXPECT_NEAR(skewing_normal({0, 0, 1, 2, 0.3})(40.0), 1.0, 1e-15);
  EXPECT_THROW(skewing_normal({0, 0, 1, 1, 1.0}), DomainError);
  EXPECT_THROW(skewing_student({0, 0, 1, 1, -1.0}, DegreesOfFreedom(3)), DomainError);
}

TEST(Skewing, StudentExamples) {
  EXPECT_EQ(skewing_student({2, 2, 1.5, 1.5, 0.4}, DegreesOfFreedom(3))(2.0), 0.5);
  EXPECT_NEAR(skewing_student(kStd, DegreesOfFreedom(3))(1.0), student_t_cdf(1.0, DegreesOfFreedom(4)), 1e-15);
  const PairParams p{0.3, -0.2, 1.2, 0.8, 0.45};
  const auto t = skewing_student(p, DegreesOfFreedom(1e6));
  const auto n = skewing_normal(p);
  for (double x = -4; x <= 4; x += 0.1) EXPECT_NEAR(t(x), n(x), 1e-5) << x;
}

TEST(Skewing, ReflectionSymmetry) {
  for (double rho : {-0.7, 0.0, 0.5}) {
    const PairParams p{0, 0, 1.3, 1.3, rho};
    for (const Family& f : {Family::normal(), Family::student_t(2.5)}) {
      const auto pi = skewing_function(p, f);
      for (double x = -6; x <= 6; x += 0.05) EXPECT_NEAR(pi(-x), 1.0 - pi(x), 1e-12);
    }
  }
}

TEST(HDensity, StandardExamples) {
  for (double x = -3; x <= 3; x += 0.5) {
    EXPECT_NEAR(h_density(kStd, Family::normal(), x), 2 * std_normal_pdf(x) * std_normal_cdf(x), 1e-15);
  }
  EXPECT_NEAR(h_density(kStd, Family::normal(), 0.0), std_normal_pdf(0.0), 1e-16);
  EXPECT_THROW(h_density(kStd, Family::normal(), 0.0, 0.0), DomainError);
}

TEST(HDensity, IntegratesToOne) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 100; ++k) {
    const auto p = testing::random_pair(rng);
    for (const Family& f : {Family::normal(), Family::student_t(3.0)}) {
      const double r = reliability(p, f, {}, ReliabilityRoute::Closed);
      auto h = [&](double x) { return h_density(p, f, x, r); };
      const double total = integrate_real_line(h, p.mu_j, p.sigma_j, quadrature_for(f)).value;
      EXPECT_NEAR(total, 1.0, 1e-9) << k << " " << f.name();
    }
  }
}

TEST(Reliability, ExamplesAndRoutes) {
  EXPECT_NEAR(reliability(kStd, Family::normal()), 0.5, 1e-12);
  EXPECT_EQ(reliability({1, 1, 2, 2, 0.3}, Family::student_t(4), {}, ReliabilityRoute::Closed), 0.5);
  EXPECT_LT(reliability({10, -10, 1, 1, 0}, Family::normal()), 1e-12);
  const PairParams p{0.4, 1.1, 1.5, 0.7, -0.35};
  const double oracle = std_normal_cdf((p.mu_j - p.mu_i) / p.difference_scale());
  EXPECT_NEAR(reliability(p, Family::normal()), oracle, 1e-10);
  EXPECT_NEAR(reliability(p, Family::normal(), {}, ReliabilityRoute::Closed), oracle, 1e-15);
  const Family t = Family::student_t(2.5);
  EXPECT_NEAR(reliability(p, t), reliability(p, t, {}, ReliabilityRoute::Closed), 1e-9);
}

TEST(Reliability, Complementary) {
  std::mt19937_64 rng(47);
  for (int k = 0; k < 100; ++k) {
    const auto p = testing::random_pair(rng);
    for (const Family& f : {Family::normal(), Family::student_t(1.5)}) {
      EXPECT_NEAR(reliability(p, f) + reliability(p.swapped(), f), 1.0, 1e-9);
    }
  }
}

TEST(MaxMin, DensitiesAndIdentity) {
  for (double x = -3; x <= 3; x += 0.25) {
    EXPECT_NEAR(max_pdf(kStd, Family::normal(), x), 2 * std_normal_pdf(x) * std_normal_cdf(x), 1e-15);
  }
  std::mt19937_64 rng(53);
  for (int k = 0; k < 30; ++k) {
    const auto p = testing::random_pair(rng);
    for (const Family& f : {Family::normal(), Family::student_t(2.2)}) {
      for (int g = 0; g <= 100; ++g) {
        const double x = p.mu_i - 5 * p.sigma_i + g * 0.1 * p.sigma_i;
        const double fi = marginal_pdf(f, p.mu_i, p.sigma_i, x);
        const double fj = marginal_pdf(f, p.mu_j, p.sigma_j, x);
        EXPECT_NEAR(min_pdf(p, f, x), fi + fj - max_pdf(p, f, x), 1e-12);
      }
      auto cfg = quadrature_for(f);
      const double centre = 0.5 * (p.mu_i + p.mu_j);
      const double scale = std::max(p.sigma_i, p.sigma_j);
      EXPECT_NEAR(integrate_real_line([&](double x) { return max_pdf(p, f, x); }, centre, scale, cfg).value, 1.0, 1e-9);
      EXPECT_NEAR(integrate_real_line([&](double x) { return min_pdf(p, f, x); }, centre, scale, cfg).value, 1.0, 1e-9);
    }
  }
}

TEST(MaxMin, RangeMeanIsPairGmd) {
  std::mt19937_64 rng(59);
  for (int k = 0; k < 20; ++k) {
    const auto p = testing::random_pair(rng, 0.9);
    for (const Family& f : {Family::normal(), Family::student_t(5.0)}) {
      auto range = [&](double x) { return x * (max_pdf(p, f, x) - min_pdf(p, f, x)); };
      const double got = integrate_real_line(range, 0.5 * (p.mu_i + p.mu_j), std::max(p.sigma_i, p.sigma_j),
                                             quadrature_for(f)).value;
      const double want = f.is_normal() ? normal_pair_gmd(p) : student_pair_gmd(p, f.dof());
      EXPECT_NEAR(got, want, 1e-8);
    }
  }
}

TEST(MuH, Examples) {
  EXPECT_NEAR(mu_H(kStd, Family::normal()), 1.0 / std::sqrt(std::numbers::pi), 1e-10);
  const PairParams p{0.7, -0.4, 1.6, 0.9, 0.25};
  const double c = pair_c(p);
  const double delta = (p.mu_j - p.mu_i) / p.sigma_i;
  const double r = std_normal_cdf(delta / c);
  const double bracket = (p.sigma_j / c) * (p.sigma_j / p.sigma_i - p.rho) * std_normal_pdf(delta / c) / r +
                         p.mu_j * std_normal_cdf(delta / c) / r;
  EXPECT_NEAR(mu_H(p, Family::normal()), bracket, 1e-10);
  PairParams shifted = p;
  shifted.mu_i += 3.5;
  shifted.mu_j += 3.5;
  EXPECT_NEAR(mu_H(shifted, Family::normal()), mu_H(p, Family::normal()) + 3.5, 1e-10);
  EXPECT_NEAR(mu_H(shifted, Family::student_t(4)), mu_H(p, Family::student_t(4)) + 3.5, 1e-9);
  EXPECT_THROW(mu_H(kStd, Family::student_t(1.0)), MomentError);
}

TEST(SkewingRoute, MatchesClosedForms) {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto vn = validate(testing::random_spec(rng, n, Family::normal()));
    const auto r = gmd_theorem2(vn);
    EXPECT_EQ(r.method, Method::Quadrature);
    EXPECT_NEAR(r.value, normal_gmd(vn).value, 1e-8);
    EXPECT_GE(r.diagnostics.at("abs_error"), 0.0);
    const auto vt = validate(testing::random_spec(rng, n, Family::student_t(5.0)));
    EXPECT_NEAR(gmd_theorem2(vt).value, student_gmd(vt).value, 1e-6);
  }
}

TEST(SkewingRoute, HeavyTailsStillConverge) {
  const auto v = validate(testing::exchangeable_spec(3, 0.5, 1.0, 0.3, Family::student_t(1.5)));
  EXPECT_NEAR(gmd_theorem2(v).value, student_gmd(v).value, 1e-6);
}

TEST(SkewingRoute, TranslationAndScale) {
  std::mt19937_64 rng(67);
  const auto base = testing::random_spec(rng, 3, Family::normal());
  const double g = gmd_theorem2(validate(base)).value;
  auto moved = base;
  for (double& m : moved.mu) m += 5.0;
  EXPECT_NEAR(gmd_theorem2(validate(moved)).value, g, 1e-10);
  auto scaled = base;
  for (double& m : scaled.mu) m *= 3.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) scaled.sigma(a, b) *= 9.0;
  EXPECT_NEAR(gmd_theorem2(validate(scaled)).value, 3.0 * g, 1e-9);
}

TEST(ExchangeableSkew, Examples) {
  const auto iid = validate(testing::exchangeable_spec(2, 0.0, 1.0, 0.0, Family::normal()));
  EXPECT_NEAR(gmd_exchangeable_skew(iid), 2.0 / std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_NEAR(gmd_exchangeable_skew(iid), quantile_gmd(normal_quantile()), 1e-8);
  const auto shifted = validate(testing::exchangeable_spec(2, 4.0, 1.0, 0.0, Family::normal()));
  EXPECT_NEAR(gmd_exchangeable_skew(shifted), gmd_exchangeable_skew(iid), 1e-10);
  for (double rho : {-0.3, 0.4, 0.8}) {
    for (const Family& f : {Family::normal(), Family::student_t(4.0)}) {
      const auto v = validate(testing::exchangeable_spec(4, 1.0, 1.7, rho, f));
      EXPECT_NEAR(gmd_exchangeable_skew(v), closed_form_gmd(v).value, 1e-8);
      EXPECT_NEAR(gmd_exchangeable_skew(v), gmd_theorem2(v).value, 1e-8);
    }
  }
  const auto unequal = validate({Family::normal(), {0.0, 1.0}, Matrix::identity(2)});
  EXPECT_FALSE(pairwise_exchangeable(unequal));
  EXPECT_THROW(gmd_exchangeable_skew(unequal), DomainError);
}

}  // namespace
}  // namespace gmd
