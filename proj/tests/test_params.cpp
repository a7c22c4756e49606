#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hardy/params.hpp"

using namespace hardy;

TEST(Exponents, ThreeDimensionalLaplacian) {
  const Exponents e = compute_exponents({3, 0.0, 0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(e.beta_minus, 0.0);
  EXPECT_DOUBLE_EQ(e.beta_plus, 1.0);
  EXPECT_DOUBLE_EQ(e.two_star_s, 6.0);
  EXPECT_DOUBLE_EQ(e.gap, 1.0);
  EXPECT_DOUBLE_EQ(e.nu, 0.5);
}

TEST(Exponents, FourDimensionsGammaThreeQuarters) {
  const Exponents e = compute_exponents({4, 0.75, 0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(e.beta_minus, 0.5);
  EXPECT_DOUBLE_EQ(e.beta_plus, 1.5);
  EXPECT_DOUBLE_EQ(e.gap, 1.0);
}

TEST(Exponents, BorderlineGapTwo) {
  const Exponents e = compute_exponents({7, 5.25, 1.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(e.beta_minus, 1.5);
  EXPECT_DOUBLE_EQ(e.beta_plus, 3.5);
  EXPECT_DOUBLE_EQ(e.gap, 2.0);
  EXPECT_NEAR(e.two_star_s, 2.4, 1e-15);
  EXPECT_FALSE(classify_regime({7, 5.25, 1.0, 0.0, 1.0}).low_dimensional);
}

TEST(Exponents, RejectsGammaAtHardyConstant) {
  try {
    compute_exponents({3, 0.25, 0.0, 0.0, 1.0});
    FAIL() << "expected InvalidParams";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParams);
  }
  EXPECT_THROW(compute_exponents({5, 2.5, 0.0, 0.0, 1.0}), Error);
  EXPECT_NO_THROW(compute_exponents({5, 2.2499, 0.0, 0.0, 1.0}));
}

TEST(Exponents, RejectsBadDimensionWeightAndRadius) {
  EXPECT_THROW(compute_exponents({2, 0.0, 0.0, 0.0, 1.0}), Error);
  EXPECT_THROW(compute_exponents({3, 0.0, 2.0, 0.0, 1.0}), Error);
  EXPECT_THROW(compute_exponents({3, 0.0, -0.1, 0.0, 1.0}), Error);
  EXPECT_THROW(compute_exponents({3, 0.0, 0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(compute_exponents({3, NAN, 0.0, 0.0, 1.0}), Error);
}

// the indicial roots against the quadratic t(n-2-t) = γ solved independently
TEST(Exponents, RandomIdentities) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(3, 12);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    ProblemParams p;
    p.n = dim(rng);
    const double H = p.hardy_constant();
    p.gamma = H - (H + 20.0) * U(rng) * 0.999 - 1e-6;
    p.s = 1.99 * U(rng);
    const Exponents e = compute_exponents(p);
    for (double b : {e.beta_minus, e.beta_plus}) EXPECT_LT(std::abs(b * (p.n - 2 - b) - p.gamma), 1e-12);
    EXPECT_LT(std::abs(e.beta_plus + e.beta_minus - (p.n - 2)), 1e-12);
    EXPECT_GT(e.gap, 0.0);
    const double disc = (p.n - 2) * (p.n - 2) - 4.0 * p.gamma;
    EXPECT_NEAR(e.beta_plus, 0.5 * ((p.n - 2) + std::sqrt(disc)), 1e-12 * (1.0 + e.beta_plus));
  }
}

TEST(CriticalDimension, Examples) {
  EXPECT_DOUBLE_EQ(critical_dimension(0.0), 4.0);
  EXPECT_DOUBLE_EQ(critical_dimension(-1.0), 2.0);
  EXPECT_DOUBLE_EQ(critical_dimension(3.0), 6.0);
  EXPECT_DOUBLE_EQ(critical_dimension(-5.0), 2.0);
}

// gap < 2 exactly when n < n_γ
TEST(CriticalDimension, MatchesLowDimensionalFlag) {
  for (int n = 3; n <= 9; ++n)
    for (double g = -3.0; g < 0.25 * (n - 2) * (n - 2); g += 0.37) {
      const ProblemParams p{n, g, 0.0, 0.0, 1.0};
      if (std::abs(n - critical_dimension(g)) < 1e-9) continue;
      EXPECT_EQ(classify_regime(p).low_dimensional, n < critical_dimension(g)) << n << " " << g;
    }
}

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime({3, -2.0, 0.5, 0.0, 1.0}).kind, SingularityKind::TrulySingular);
  EXPECT_EQ(classify_regime({3, -1.0, 0.0, 0.0, 1.0}).kind, SingularityKind::MerelySingular);
  EXPECT_EQ(classify_regime({3, 0.0, 0.0, 0.0, 1.0}).kind, SingularityKind::MerelySingular);
  const RegimeTag t = classify_regime({4, 0.75, 0.0, 0.0, 1.0});
  EXPECT_EQ(t.kind, SingularityKind::TrulySingular);
  EXPECT_TRUE(t.low_dimensional);
  EXPECT_EQ(to_string(SingularityKind::MerelySingular), "MerelySingular");
}

TEST(Params, HelpersCopy) {
  const ProblemParams p{3, 0.1, 0.5, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(p.with_lambda(2.0).lam, 2.0);
  EXPECT_DOUBLE_EQ(p.with_radius(3.0).ball_radius, 3.0);
  EXPECT_DOUBLE_EQ(p.lam, 0.0);
  EXPECT_DOUBLE_EQ(hardy_sobolev_exponent(3, 1.0), 4.0);
}
