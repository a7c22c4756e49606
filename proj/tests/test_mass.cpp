#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hardy/mass.hpp"
#include "hardy/spectral.hpp"

using namespace hardy;
using std::numbers::pi;

namespace {

double mass_at(const ProblemParams& p, double lam) {
  return interior_mass(p, RadialPotential::constant(lam), default_grid(p.ball_radius, 801)).mass;
}

}  // namespace

TEST(Mass, EulerCaseUnitBall) {
  for (const ProblemParams p : {ProblemParams{3, 0.0, 0.0, 0.0, 1.0}, ProblemParams{4, 0.75, 0.0, 0.0, 1.0},
                                ProblemParams{3, -0.4, 0.0, 0.0, 1.0}, ProblemParams{5, 1.9, 0.5, 0.0, 1.0}})
    EXPECT_NEAR(interior_mass(p, RadialPotential::zero(), default_grid(1.0, 401)).mass, -1.0, 1e-8);
}

TEST(Mass, EulerCaseRadiusPower) {
  for (double rho : {0.5, 2.0, 7.0}) {
    const ProblemParams p{4, 0.3, 0.0, 0.0, rho};
    const double want = -std::pow(rho, -compute_exponents(p).gap);
    EXPECT_NEAR(interior_mass(p, RadialPotential::zero(), default_grid(rho, 401)).mass / want, 1.0, 1e-8);
  }
}

// ν = 1/2: m(λ) = -√λ cot √λ
TEST(Mass, TrigonometricCase) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  EXPECT_NEAR(mass_at(p, 1.0), -1.0 / std::tan(1.0), 1e-8);
  EXPECT_NEAR(mass_at(p, 1.0), -0.6421, 1e-4);
  for (double lam : {0.3, 4.0, 9.0}) EXPECT_NEAR(mass_at(p, lam), -std::sqrt(lam) / std::tan(std::sqrt(lam)), 1e-7);
}

TEST(BesselOracle, Limits) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  EXPECT_NEAR(mass_oracle_bessel(p, 1.0), -1.0 / std::tan(1.0), 1e-12);
  for (const ProblemParams q : {p, ProblemParams{3, -0.5, 1.0, 0.0, 1.0}, ProblemParams{4, 0.9, 0.0, 0.0, 1.0}}) {
    EXPECT_NEAR(mass_oracle_bessel(q, 1e-10), -1.0, 1e-6);
    EXPECT_NEAR(mass_oracle_bessel(q, bessel_lambda_star(q)), 0.0, 1e-10);
  }
}

TEST(BesselOracle, PoleCrossing) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  try {
    mass_oracle_bessel(p, pi * pi + 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PoleCrossing);
  }
}

TEST(Mass, AgreesWithBesselOracle) {
  for (const ProblemParams p : {ProblemParams{3, 0.2, 0.0, 0.0, 1.0}, ProblemParams{5, 2.0, 0.5, 0.0, 1.0},
                                ProblemParams{3, -0.5, 1.2, 0.0, 1.0}}) {
    const double l1 = lambda1(p).value;
    for (double f : {0.05, 0.3, 0.6, 0.9}) {
      const double lam = f * l1, oracle = mass_oracle_bessel(p, lam);
      EXPECT_LT(std::abs(mass_at(p, lam) - oracle), 1e-6 * (1.0 + std::abs(oracle))) << lam;
    }
  }
}

TEST(Mass, StrictlyIncreasingInLambda) {
  const ProblemParams p{4, 0.75, 0.0, 0.0, 1.0};
  double prev = -INFINITY;
  for (int k = 0; k < 10; ++k) {
    const double m = mass_at(p, 0.9 * pi * pi * k / 9.0);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(Mass, IncreasingWithDomain) {
  const double lam = 1.0;
  double prev = -INFINITY;
  for (double rho : {0.6, 0.8, 1.0, 1.2}) {
    const double m = mass_at({3, 0.1, 0.0, 0.0, rho}, lam);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(Mass, LipschitzInLambda) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  const double m0 = mass_at(p, 2.0);
  const double d1 = std::abs(mass_at(p, 2.0 + 1e-3) - m0), d2 = std::abs(mass_at(p, 2.0 + 5e-4) - m0);
  EXPECT_NEAR(d1 / d2, 2.0, 0.01);
}

TEST(Mass, SingularSolutionAsymptotics) {
  const ProblemParams p{3, 0.15, 0.0, 0.0, 1.0};
  const MassResult r = interior_mass(p, RadialPotential::constant(2.0), default_grid(1.0, 801));
  const Exponents e = compute_exponents(p);
  const auto& H = r.singular_solution;
  // H r^{β₊} = c₁ + m r^{gap} + O(r²)
  const double r0 = H.grid.nodes.front();
  EXPECT_NEAR(H.values.front() * std::pow(r0, e.beta_plus), r.c1 + r.mass * std::pow(r0, e.gap), 1e-7);
  EXPECT_NEAR(r.regression_mass, r.mass, 1e-4 * (1.0 + std::abs(r.mass)));
  EXPECT_NEAR(H.boundary_value, 0.0, 1e-10);
}

TEST(Mass, RejectsHighDimensions) {
  try {
    interior_mass({5, 0.0, 0.0, 0.0, 1.0}, RadialPotential::zero(), default_grid(1.0, 101));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RegimeMismatch);
  }
  EXPECT_THROW(interior_mass({6, 0.0, 0.0, 0.0, 1.0}, RadialPotential::zero(), default_grid(1.0, 101)), Error);
}

TEST(Mass, NotCoerciveAboveFirstEigenvalue) {
  try {
    interior_mass({3, 0.0, 0.0, 0.0, 1.0}, RadialPotential::constant(10.5), default_grid(1.0, 201));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCoercive);
  }
}

TEST(Threshold, ByMass) {
  for (const ProblemParams p : {ProblemParams{3, 0.0, 0.5, 0.0, 1.0}, ProblemParams{4, 0.75, 0.0, 0.0, 1.0}}) {
    const ThresholdReport r = lambda_star_by_mass(p);
    EXPECT_NEAR(r.lambda_star, pi * pi / 4.0, 1e-6);
    EXPECT_NEAR(r.lambda_star, 2.4674, 1e-4);
    for (const auto& [k, v] : r.cross_residuals) EXPECT_LT(v, 1e-3) << k;
    EXPECT_TRUE(r.conditional);
    EXPECT_LT(r.bracket.first, r.lambda_star);
    EXPECT_GT(r.bracket.second, r.lambda_star);
  }
}

TEST(Threshold, RadiusScaling) {
  const ProblemParams p{3, 0.1, 0.0, 0.0, 1.0};
  EXPECT_NEAR(lambda_star_by_mass(p.with_radius(2.0)).lambda_star, lambda_star_by_mass(p).lambda_star / 4.0, 1e-6);
}

TEST(Threshold, MerelySingularThreeDimensionsIsElsewhere) {
  EXPECT_THROW(lambda_star_by_mass({3, -0.5, 0.0, 0.0, 1.0}), Error);
}

TEST(Threshold, MerelySingularHighDimensional) {
  EXPECT_DOUBLE_EQ(lambda_star_merely_singular_highdim({4, -2.0, 0.0, 0.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(lambda_star_merely_singular_highdim({5, -1.0, 0.0, 0.0, 2.0}), 0.25);
  const ProblemParams p{4, -0.5, 0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(lambda_star_merely_singular_highdim(p), 0.5);
  EXPECT_LT(0.5, lambda1(p).value);
  EXPECT_THROW(lambda_star_merely_singular_highdim({4, 0.0, 0.0, 0.0, 1.0}), Error);
  EXPECT_THROW(lambda_star_merely_singular_highdim({4, -1.0, 0.5, 0.0, 1.0}), Error);
}

TEST(Pohozaev, ZeroFunction) {
  const ProblemParams p{3, 0.0, 0.0, 1.0, 1.0};
  RadialFunction u;
  u.grid = default_grid(1.0, 101);
  u.values.assign(101, 0.0);
  EXPECT_EQ(pohozaev_residual(p, u, 1.0), 0.0);
}

TEST(Pohozaev, GroundStateAndDetector) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  const ProblemParams q = p.with_lambda(1.5 * bessel_lambda_star(p));
  const GroundState gs = ground_state(q, default_grid(1.0, 1001));
  EXPECT_LT(pohozaev_residual(q, gs.profile, gs.mu), 1e-3);
  RadialFunction bad = gs.profile;
  bad.derivs.clear();
  for (std::size_t i = 0; i < bad.values.size(); ++i)
    if (bad.grid.nodes[i] < 0.1) bad.values[i] *= 1.01;
  EXPECT_GT(pohozaev_residual(q, bad, gs.mu), 1e-2);
}

TEST(SubSuper, ExactEulerHasNoStrictSign) {
  const SubSuperReport r = subsupersolution_check({3, 0.0, 0.0, 0.0, 1.0}, 0.5, BetaChoice::Plus, SolutionSign::Super, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_FALSE(r.verified);
  EXPECT_LT(r.max_abs_operator, 1e-10);
}

TEST(SubSuper, SuperAndSubSolutions) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  const SubSuperReport sup = subsupersolution_check(p, 0.5, BetaChoice::Plus, SolutionSign::Super);
  const SubSuperReport sub = subsupersolution_check(p, 0.5, BetaChoice::Plus, SolutionSign::Sub);
  EXPECT_TRUE(sup.verified);
  EXPECT_TRUE(sub.verified);
  EXPECT_GT(sup.delta, 0.01);
  EXPECT_GT(sub.delta, 0.01);
  EXPECT_DOUBLE_EQ(sup.beta, 1.0);
  EXPECT_GT(sup.beta - sup.beta_prime, 0.0);
  EXPECT_LT(sup.beta - sup.beta_prime, 0.5);
  EXPECT_LT(sup.coefficient * sub.coefficient, 0.0);
}

TEST(SubSuper, ThetaWindow) {
  try {
    subsupersolution_check({3, 0.0, 0.0, 0.0, 1.0}, 1.5, BetaChoice::Minus, SolutionSign::Sub);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoAdmissibleBetaPrime);
  }
}

TEST(EulerFit, RecoversCoefficients) {
  const ProblemParams p{4, 0.5, 0.0, 0.0, 1.0};
  const EulerFitReport r = euler_combination_fit(p, 0.7, 2.5);
  EXPECT_NEAR(r.c_minus, 0.7, 1e-9);
  EXPECT_NEAR(r.c_plus, 2.5, 1e-9);
  EXPECT_LT(r.residual, 1e-10);
}
