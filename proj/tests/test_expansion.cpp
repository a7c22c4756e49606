#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "hardy/expansion.hpp"
#include "hardy/extremals.hpp"
#include "hardy/mass.hpp"

using namespace hardy;

namespace {

struct Case {
  ProblemParams p;
  const char* label;
};

const Case kLowDim[] = {
    {{3, 0.0, 0.0, 0.0, 1.0}, "n3"},
    {{4, 0.75, 0.0, 0.0, 1.0}, "n4_gap1"},
    {{3, -0.5, 1.0, 0.0, 1.0}, "negative_gamma"},
    {{3, 0.1, 0.5, 0.0, 1.0}, "weighted"},
};

}  // namespace

// slope of J(u_ε) - μ_RN against ε^gap has the sign of -mass
TEST(SignLaw, OppositeToMass) {
  for (const auto& c : kLowDim) {
    const double ls = bessel_lambda_star(c.p);
    for (double f : {0.5, 1.5}) {
      const ProblemParams q = c.p.with_lambda(f * ls);
      const double m = boundary_mass(q, RadialPotential::constant(q.lam));
      const SlopeFit fit = fit_expansion(q);
      EXPECT_EQ(fit.rate, ExpansionRate::Gap);
      EXPECT_LT(fit.slope * m, 0.0) << c.label << " f=" << f;
    }
  }
}

TEST(SignLaw, SlopeVanishesAtThreshold) {
  for (const auto& c : kLowDim) {
    const double ls = bessel_lambda_star(c.p);
    const double at = fit_expansion(c.p.with_lambda(ls)).slope;
    const double above = fit_expansion(c.p.with_lambda(1.2 * ls)).slope;
    EXPECT_LT(std::abs(at), 0.1 * std::abs(above)) << c.label;
  }
}

// the constant in front of ε^gap: -μ·gap·ω·m/(χ·I) with I = ∫U^p r^{-s}
TEST(SignLaw, SlopeMagnitudeTracksMass) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  const double ls = bessel_lambda_star(p);
  const SlopeFit a = fit_expansion(p.with_lambda(0.5 * ls));
  const SlopeFit b = fit_expansion(p.with_lambda(1.5 * ls));
  const double ma = boundary_mass(p.with_lambda(0.5 * ls), RadialPotential::constant(0.5 * ls));
  const double mb = boundary_mass(p.with_lambda(1.5 * ls), RadialPotential::constant(1.5 * ls));
  EXPECT_NEAR((a.slope / ma) / (b.slope / mb), 1.0, 0.05);
}

TEST(Fit, NuisanceColumns) {
  EXPECT_EQ(expansion_nuisance({4, 0.75, 0.0, 0.0, 1.0}, 0.01).size(), 2u);
  EXPECT_EQ(expansion_nuisance({3, 0.1, 0.5, 0.0, 1.0}, 0.01).size(), 2u);
  EXPECT_EQ(expansion_nuisance({6, 1.0, 0.0, 0.0, 1.0}, 0.01).size(), 1u);
  EXPECT_EQ(expansion_nuisance({5, 0.5, 0.5, 0.0, 1.0}, 0.01).size(), 2u);
  // gap = 1: the resonant ε²ln(1/ε) replaces the duplicate ε²
  const auto v = expansion_nuisance({3, 0.0, 0.0, 0.0, 1.0}, 0.01);
  EXPECT_NEAR(v[1], 1e-4 * std::log(100.0), 1e-15);
}

TEST(Fit, LadderTooShort) {
  EXPECT_THROW(fit_expansion({3, 0.0, 0.0, 1.0, 1.0}, {0.01, 0.005}), Error);
}

TEST(Fit, DefaultLadder) {
  const auto l = default_eps_ladder(2.0);
  ASSERT_EQ(l.size(), 7u);
  EXPECT_DOUBLE_EQ(l.front(), 2.0 / 64.0);
  EXPECT_DOUBLE_EQ(l.back(), 2.0 / 4096.0);
}

// gap = 2: the ε²ln(1/ε) coefficient is -λ ω (lim U r^{β₊})² / ‖U‖²_{p,s};
// seven ε over two decades leave roughly a 10% bias
TEST(Fit, BorderlineLogRate) {
  const ProblemParams p{7, 5.25, 0.5, 1.0, 1.0};
  const double P = compute_exponents(p).two_star_s;
  boost::math::quadrature::exp_sinh<double> q;
  const double Lp = sphere_area(p.n) * q.integrate([&](double r) {
    return r < 1e-30 || r > 1e30 ? 0.0 : std::pow(eval_U(p, r), P) * std::pow(r, p.n - 1 - p.s);
  });
  const double predicted = -p.lam * sphere_area(p.n) / std::pow(Lp, 2.0 / P);
  const SlopeFit f = fit_expansion(p);
  EXPECT_EQ(f.rate, ExpansionRate::SquareLog);
  EXPECT_LT(f.slope, 0.0);
  EXPECT_NEAR(f.slope / predicted, 1.0, 0.15);
}

TEST(TestFunction, EnergyBreakdownIsConsistent) {
  const ProblemParams p{3, 0.1, 0.5, 1.0, 1.0};
  const EnergyBreakdown b = energy_of_test_function(p, make_test_function(p, 0.01));
  const double P = compute_exponents(p).two_star_s;
  EXPECT_NEAR(b.value, (b.gradient - b.hardy_linear) / std::pow(b.constraint, 2.0 / P), 1e-14 * b.value);
  EXPECT_GT(b.gradient, b.hardy_linear);
}

TEST(TestFunction, CorrectionOnlyInLowDimensions) {
  EXPECT_TRUE(make_test_function({3, 0.0, 0.0, 1.0, 1.0}, 0.01).correction.has_value());
  EXPECT_FALSE(make_test_function({5, 0.0, 0.5, 1.0, 1.0}, 0.01).correction.has_value());
}
