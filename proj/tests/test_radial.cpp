#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hardy/operator.hpp"
#include "hardy/radial.hpp"
#include "hardy/spectral.hpp"
#include "hardy/tridiag.hpp"

using namespace hardy;
using std::numbers::pi;

TEST(Grid, UniformExample) {
  const RadialGrid g = make_grid(1.0, 4, Grading::Uniform, 0.25);
  ASSERT_EQ(g.size(), 4u);
  const double want[] = {0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.nodes[i], want[i]);
}

TEST(Grid, GeometricExample) {
  const RadialGrid g = make_grid(1.0, 3, Grading::Geometric, 0.01);
  EXPECT_DOUBLE_EQ(g.nodes[0], 0.01);
  EXPECT_NEAR(g.nodes[1], 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(g.nodes[2], 1.0);
}

TEST(Grid, GeometricConstantRatio) {
  const RadialGrid g = make_grid(2.0, 16, Grading::Geometric, 1e-6);
  const double q = std::pow(2.0 / 1e-6, 1.0 / 15.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g.nodes[i] / g.nodes[i - 1], q, 1e-12 * q);
  EXPECT_DOUBLE_EQ(g.nodes.back(), 2.0);
}

TEST(Grid, Rejections) {
  EXPECT_THROW(make_grid(1.0, 4, Grading::Uniform, 1.0), Error);
  EXPECT_THROW(make_grid(1.0, 4, Grading::Uniform, 0.0), Error);
  EXPECT_THROW(make_grid(1.0, 1, Grading::Uniform, 0.1), Error);
  EXPECT_THROW(make_grid(-1.0, 4, Grading::Uniform, 0.1), Error);
}

TEST(Grid, RefineBisects) {
  const RadialGrid g = make_grid(1.0, 5, Grading::Geometric, 1e-3);
  const RadialGrid f = refine(g);
  ASSERT_EQ(f.size(), 9u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(f.nodes[2 * i], g.nodes[i]);
  EXPECT_NEAR(f.nodes[1], std::sqrt(g.nodes[0] * g.nodes[1]), 1e-15);
  const RadialGrid u = refine(make_grid(1.0, 3, Grading::Uniform, 0.5));
  EXPECT_DOUBLE_EQ(u.nodes[1], 0.625);
}

namespace {

RadialFunction sample(const RadialGrid& g, double (*f)(double)) {
  RadialFunction F;
  F.grid = g;
  for (double r : g.nodes) F.values.push_back(f(r));
  return F;
}

}  // namespace

TEST(Quadrature, BallVolume) {
  const RadialGrid g = default_grid(1.0, 401);
  EXPECT_NEAR(quadrature(sample(g, [](double) { return 1.0; }), 3, 0.0), 4.0 * pi / 3.0, 1e-10);
}

TEST(Quadrature, CancellingWeight) {
  const RadialGrid g = default_grid(1.0, 401);
  EXPECT_NEAR(quadrature(sample(g, [](double r) { return r * r; }), 3, -2.0, 2.0), 4.0 * pi / 3.0, 1e-10);
}

TEST(Quadrature, InverseRadius) {
  const RadialGrid g = default_grid(1.0, 401);
  EXPECT_NEAR(quadrature(sample(g, [](double r) { return 1.0 / r; }), 3, 0.0, -1.0), 2.0 * pi, 1e-9);
}

TEST(Quadrature, NonIntegrable) {
  const RadialGrid g = default_grid(1.0, 101);
  try {
    quadrature(sample(g, [](double r) { return std::pow(r, -3.0); }), 3, 0.0, -3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonIntegrable);
  }
}

// g = f r^k piecewise quadratic integrates exactly, on any node spacing
TEST(Quadrature, QuadraticExactness) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int count : {3, 4, 7, 10}) {
    RadialGrid g;
    g.radius = 1.0;
    double r = 0.2;
    for (int i = 0; i < count; ++i) g.nodes.push_back(r += 0.05 + U(rng) * 0.1);
    g.radius = g.nodes.back();
    RadialFunction f;
    f.grid = g;
    // n = 1 weight 0: ∫ r^{0} f dr over [r0, R] with f = 1 + 2r + 3r², plus the r0 corner term
    for (double x : g.nodes) f.values.push_back(1.0 + 2.0 * x + 3.0 * x * x);
    const double a = g.nodes.front(), b = g.radius;
    const double exact = (b + b * b + b * b * b) - (a + a * a + a * a * a) + f.values.front() * a;
    EXPECT_NEAR(quadrature(f, 1, 0.0), sphere_area(1) * exact, 1e-12) << count;
  }
}

TEST(GaussRules, PolynomialExactness) {
  for (const QuadratureRule& q : {composite_gauss(0.3, 2.0, 3), graded_gauss(0.01, 2.0, 1.3)}) {
    double s = 0.0, e = 0.0;
    const double a = q.x.front() < 0.2 ? 0.01 : 0.3;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], 19);
    e = (std::pow(2.0, 20) - std::pow(a, 20)) / 20.0;
    EXPECT_NEAR(s / e, 1.0, 1e-12);
  }
}

TEST(Tridiag, SolveMatchesDense) {
  SymTridiag T;
  T.diag = {4.0, 5.0, 6.0, 7.0, 8.0};
  T.off = {1.0, -2.0, 0.5, 1.5};
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) D(i, i) = T.diag[i];
  for (int i = 0; i < 4; ++i) D(i, i + 1) = D(i + 1, i) = T.off[i];
  const std::vector<double> b = {1.0, -1.0, 2.0, 0.0, 3.0};
  const auto x = solve(T, b);
  const Eigen::VectorXd ref = D.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 5));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(x[i], ref(i), 1e-13);
}

TEST(Tridiag, SmallestPencilEigenvalueMatchesDense) {
  const RadialGrid g = make_grid(1.0, 40, Grading::Uniform, 0.01);
  const RadialPencil P = assemble_operator({3, -0.3, 0.0, 0.0, 1.0}, RadialPotential::zero(), g);
  const std::size_t N = P.A.diag.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N), M = A;
  for (std::size_t i = 0; i < N; ++i) A(i, i) = P.A.diag[i], M(i, i) = P.M.diag[i];
  for (std::size_t i = 0; i + 1 < N; ++i) {
    A(i, i + 1) = A(i + 1, i) = P.A.off[i];
    M(i, i + 1) = M(i + 1, i) = P.M.off[i];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  const PencilEigenpair ep = smallest_eigenpair(P.A, P.M);
  EXPECT_NEAR(ep.value, es.eigenvalues()(0), 1e-10 * es.eigenvalues()(0));
  EXPECT_EQ(negative_count(P.A.shifted(P.M, ep.value * 0.999)), 0u);
  EXPECT_EQ(negative_count(P.A.shifted(P.M, ep.value * 1.001)), 1u);
}

// first eigenvalue π² for n = 3, γ = 0; error falls by about 4 per halving
TEST(Operator, LaplacianEigenvalueConvergesAtSecondOrder) {
  const ProblemParams p{3, 0.0, 0.0, 0.0, 1.0};
  double prev = 0.0;
  for (int count : {41, 81, 161}) {
    const RadialPencil P = assemble_operator(p, RadialPotential::zero(), make_grid(1.0, count, Grading::Uniform, 1e-6));
    const double err = std::abs(smallest_eigenpair(P.A, P.M).value - pi * pi);
    if (prev > 0.0) EXPECT_GT(prev / err, 3.8);
    prev = err;
  }
  EXPECT_LT(prev, 2e-3);
}

TEST(Operator, NegativeGammaRaisesEigenvalue) {
  const RadialGrid g = default_grid(1.0, 401);
  const double l0 = lambda1({3, 0.0, 0.0, 0.0, 1.0}, g).value;
  for (double gamma : {-0.1, -1.0, -3.0}) EXPECT_GT(lambda1({3, gamma, 0.0, 0.0, 1.0}, g).value, l0);
}
