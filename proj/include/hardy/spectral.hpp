#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Sparse>

#include "hardy/extremals.hpp"
#include "hardy/operator.hpp"
#include "hardy/params.hpp"
#include "hardy/radial.hpp"
#include "hardy/tridiag.hpp"

namespace hardy {

struct EigenResult {
  double value = 0.0;            ///< Richardson extrapolation of the two meshes below
  RadialFunction eigenfunction;  ///< on the refined grid, max-normalized
  double residual = 0.0;
  int mesh_count = 0;
  double coarse_value = 0.0;
  double fine_value = 0.0;
};

namespace detail {

inline RadialFunction nodal_function(const RadialGrid& g, const std::vector<double>& interior) {
  RadialFunction f;
  f.grid = g;
  f.values = interior;
  f.values.push_back(0.0);
  f.boundary_value = 0.0;
  return f;
}

/// Solves on `grid` and on its refinement; second-order extrapolation.
template <class Assemble>
EigenResult extrapolated_eigen(const RadialGrid& grid, Assemble&& assemble) {
  const auto coarse = [&] {
    const RadialPencil P = assemble(grid);
    return smallest_eigenpair(P.A, P.M);
  }();
  const RadialGrid fine_grid = refine(grid);
  const RadialPencil P = assemble(fine_grid);
  const auto fine = smallest_eigenpair(P.A, P.M);

  EigenResult r;
  r.coarse_value = coarse.value;
  r.fine_value = fine.value;
  r.value = (4.0 * fine.value - coarse.value) / 3.0;
  r.residual = fine.residual;
  r.mesh_count = static_cast<int>(fine_grid.size());
  std::vector<double> v = fine.vector;
  const double peak = *std::max_element(v.begin(), v.end());
  for (double& x : v) x /= peak;
  r.eigenfunction = nodal_function(fine_grid, v);
  return r;
}

}  // namespace detail

/// First Dirichlet eigenvalue of -Δ - γ/|x|² - h on the ball, over radial functions.
inline EigenResult lambda1_with_potential(const ProblemParams& p, const RadialPotential& h, const RadialGrid& grid) {
  p.validate();
  auto r = detail::extrapolated_eigen(grid, [&](const RadialGrid& g) { return assemble_operator(p, h, g); });
  return r;
}

inline EigenResult lambda1(const ProblemParams& p, const RadialGrid& grid) {
  return lambda1_with_potential(p, RadialPotential::zero(), grid);
}

inline EigenResult lambda1(const ProblemParams& p) { return lambda1(p, default_grid(p.ball_radius)); }

/// Uniform grid suited to the weighted problem: its eigenfunction is smooth in r
/// and the weight is mildly singular, so geometric grading only hurts conditioning.
inline RadialGrid weighted_problem_grid(double radius, int count = 2001) {
  return make_grid(radius, count, Grading::Uniform, 1e-6 * radius);
}

/// Smallest eigenvalue of ∫|∇u|²|x|^{-2β₊} / ∫u²|x|^{-2β₊} over radial u with u(ρ) = 0.
inline EigenResult janelli_lambda_star(const ProblemParams& p, const RadialGrid& grid) {
  const Exponents e = compute_exponents(p);
  if (!(e.gap < 2.0)) fail(ErrorKind::RegimeMismatch, "weighted eigenvalue needs gap < 2");
  return detail::extrapolated_eigen(grid, [&](const RadialGrid& g) { return assemble_weighted_operator(p, g); });
}

inline EigenResult janelli_lambda_star(const ProblemParams& p) {
  return janelli_lambda_star(p, weighted_problem_grid(p.ball_radius));
}

// ---------------------------------------------------------------------------
// Ground state

/// Discrete form of J(u) = ∫(|∇u|² - γu²/|x|² - λu²) / (∫|u|^p |x|^{-s})^{2/p}
/// over P1 profiles with the power-law corner u0(r/r0)^{-β₋} on [0, r0]. All
/// integrals are exact up to quadrature, so the discrete space is conforming.
struct DiscreteEnergy {
  ProblemParams params;
  RadialGrid grid;
  SymTridiag B;                   ///< A - λM
  double exponent = 0.0;          ///< p = 2*(s)
  double omega = 0.0;
  double corner = 0.0;            ///< ∫_0^{r0} (r/r0)^{-pβ₋} r^{n-1-s} dr
  // Gauss points of element e: [offset[e], offset[e+1]); weights include r^{n-1-s}
  std::vector<std::size_t> offset;
  std::vector<double> qw, qa;     ///< weight, value of the left hat (right hat is 1 - qa)

  DiscreteEnergy(const ProblemParams& prm, const RadialGrid& g) : params(prm), grid(g) {
    const Exponents e = compute_exponents(prm);
    exponent = e.two_star_s;
    omega = sphere_area(prm.n);
    const RadialPencil P = assemble_operator(prm, RadialPotential::zero(), g);
    B = P.A.shifted(P.M, prm.lam);

    const auto& r = g.nodes;
    const double k = prm.n - 1 - prm.s;
    offset.push_back(0);
    for (std::size_t el = 0; el + 1 < r.size(); ++el) {
      const double a = r[el], b = r[el + 1], L = b - a;
      const QuadratureRule rule = graded_gauss(a, b);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        qw.push_back(rule.w[q] * std::pow(rule.x[q], k));
        qa.push_back((b - rule.x[q]) / L);
      }
      offset.push_back(qw.size());
    }
    corner = std::pow(r.front(), prm.n - prm.s) / (prm.n - prm.s - exponent * e.beta_minus);
  }

  std::size_t size() const { return grid.size() - 1; }

  double left(const std::vector<double>& u, std::size_t el) const { return u[el]; }
  double right(const std::vector<double>& u, std::size_t el) const { return el + 1 < u.size() ? u[el + 1] : 0.0; }

  /// ∫|u|^p |x|^{-s} dx restricted to elements [0, upto) plus the corner
  double constraint_partial(const std::vector<double>& u, std::size_t upto) const {
    double acc = corner * std::pow(std::abs(u[0]), exponent);
    for (std::size_t el = 0; el < upto; ++el) {
      const double ua = left(u, el), ub = right(u, el);
      for (std::size_t q = offset[el]; q < offset[el + 1]; ++q)
        acc += qw[q] * std::pow(std::abs(qa[q] * ua + (1.0 - qa[q]) * ub), exponent);
    }
    return omega * acc;
  }
  double constraint(const std::vector<double>& u) const { return constraint_partial(u, offset.size() - 1); }
  double quadratic(const std::vector<double>& u) const { return omega * B.quadratic_form(u); }
  double energy(const std::vector<double>& u) const {
    return quadratic(u) / std::pow(constraint(u), 2.0 / exponent);
  }
  void normalize(std::vector<double>& u) const {
    const double c = std::pow(constraint(u), 1.0 / exponent);
    for (double& v : u) v /= c;
  }
  /// f_i = ∫|u|^{p-2}u φ_i r^{n-1-s} dr
  std::vector<double> nonlinearity(const std::vector<double>& u) const {
    std::vector<double> f(u.size(), 0.0);
    f[0] = corner * std::pow(std::abs(u[0]), exponent - 2.0) * u[0];
    for (std::size_t el = 0; el + 1 < offset.size(); ++el) {
      const double ua = left(u, el), ub = right(u, el);
      double fa = 0.0, fb = 0.0;
      for (std::size_t q = offset[el]; q < offset[el + 1]; ++q) {
        const double v = qa[q] * ua + (1.0 - qa[q]) * ub;
        const double g = qw[q] * std::pow(std::abs(v), exponent - 2.0) * v;
        fa += g * qa[q];
        fb += g * (1.0 - qa[q]);
      }
      f[el] += fa;
      if (el + 1 < u.size()) f[el + 1] += fb;
    }
    return f;
  }
  /// Jacobian of `nonlinearity`: (p-1)∫|u|^{p-2} φ_i φ_j r^{n-1-s} dr.
  SymTridiag nonlinearity_jacobian(const std::vector<double>& u) const {
    SymTridiag J;
    J.diag.assign(u.size(), 0.0);
    J.off.assign(u.size() - 1, 0.0);
    const double P = exponent;
    J.diag[0] = (P - 1.0) * corner * std::pow(std::abs(u[0]), P - 2.0);
    for (std::size_t el = 0; el + 1 < offset.size(); ++el) {
      const double ua = left(u, el), ub = right(u, el);
      double jaa = 0.0, jab = 0.0, jbb = 0.0;
      for (std::size_t q = offset[el]; q < offset[el + 1]; ++q) {
        const double v = qa[q] * ua + (1.0 - qa[q]) * ub;
        const double g = (P - 1.0) * qw[q] * std::pow(std::abs(v), P - 2.0);
        jaa += g * qa[q] * qa[q];
        jab += g * qa[q] * (1.0 - qa[q]);
        jbb += g * (1.0 - qa[q]) * (1.0 - qa[q]);
      }
      J.diag[el] += jaa;
      if (el + 1 < u.size()) {
        J.diag[el + 1] += jbb;
        J.off[el] += jab;
      }
    }
    return J;
  }
  /// ‖Bu - μf(u)‖ / ‖Bu‖ for the discrete Euler-Lagrange system.
  double euler_lagrange_residual(const std::vector<double>& u, double mu) const {
    const auto Bu = B * u;
    const auto f = nonlinearity(u);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = Bu[i] - mu * f[i];
      rn += d * d;
      bn += Bu[i] * Bu[i];
    }
    return std::sqrt(rn / bn);
  }
};

struct GroundStateOptions {
  int outer_iterations = 400;
  int fixed_point_iterations = 25;  ///< per outer sweep
  int newton_iterations = 60;
  double newton_start = 1e-3;       ///< residual below which Newton takes over
  double residual_tol = 1e-8;
  double damping = 0.5;
  double initial_eps_fraction = 0.1;
};

struct GroundState {
  double mu = 0.0;  ///< radial infimum: minimizers are not known to be radial in general
  RadialFunction profile;
  double constraint_value = 0.0;
  double concentration_score = 0.0;  ///< share of ∫u^p|x|^{-s} inside r < 10·r0
  double residual = 0.0;
  double initial_eps = 0.0;
  int iterations = 0;
  /// false when the iteration ran out of budget at or above μ_RN: the infimum is
  /// then approached by a concentrating sequence and `profile` is its last member
  bool attained = true;
};

inline double concentration_score(const DiscreteEnergy& E, const std::vector<double>& u) {
  const double cut = 10.0 * E.grid.r0();
  std::size_t upto = 0;
  while (upto + 1 < E.grid.size() && E.grid.nodes[upto + 1] <= cut) ++upto;
  return E.constraint_partial(u, upto) / E.constraint(u);
}

namespace detail {

/// One Newton step on Bu - μ c∘u^{p-1} = 0, ω Σ c|u|^p = 1 by bordering the
/// tridiagonal Jacobian block. Returns false if the block is singular.
inline bool newton_step(const DiscreteEnergy& E, std::vector<double>& u, double& mu) {
  const std::size_t N = u.size();
  const auto f = E.nonlinearity(u);
  const auto Bu = E.B * u;
  std::vector<double> F(N);
  for (std::size_t i = 0; i < N; ++i) F[i] = Bu[i] - mu * f[i];
  const double g = E.constraint(u) - 1.0;

  Eigen::SparseMatrix<double> S(N, N);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * N);
  const SymTridiag T = E.B.shifted(E.nonlinearity_jacobian(u), mu);
  for (std::size_t i = 0; i < N; ++i) {
    trip.emplace_back(i, i, T.diag[i]);
    if (i + 1 < N) {
      trip.emplace_back(i, i + 1, T.off[i]);
      trip.emplace_back(i + 1, i, T.off[i]);
    }
  }
  S.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(S);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd rhs(N), fv(N);
  for (std::size_t i = 0; i < N; ++i) {
    rhs[i] = -F[i];
    fv[i] = f[i];
  }
  const Eigen::VectorXd a = lu.solve(rhs), b = lu.solve(fv);
  const double wp = E.omega * E.exponent;
  const double denom = wp * fv.dot(b);
  if (!(std::abs(denom) > 0.0)) return false;
  const double dmu = (-g - wp * fv.dot(a)) / denom;

  auto merit = [&](const std::vector<double>& v, double m) {
    const double gv = E.constraint(v) - 1.0;
    return E.euler_lagrange_residual(v, m) + std::abs(gv);
  };
  const double m0 = merit(u, mu);
  for (double step = 1.0; step > 1e-4; step *= 0.5) {
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = u[i] + step * (a[i] + dmu * b[i]);
    const double mv = mu + step * dmu;
    if (merit(v, mv) < m0) {
      u = std::move(v);
      mu = mv;
      return true;
    }
  }
  return false;
}

}  // namespace detail

namespace detail {

/// κ^{(n-2)/2} u(κ r) on the same nodes; J is invariant under this map in the
/// whole space. Linear interpolation in ln r, corner model below r0.
inline std::vector<double> dilate(const DiscreteEnergy& E, const std::vector<double>& u, double kappa) {
  const auto& r = E.grid.nodes;
  const double beta_minus = compute_exponents(E.params).beta_minus;
  const double amp = std::pow(kappa, 0.5 * (E.params.n - 2));
  std::vector<double> v(u.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = kappa * r[i];
    double val;
    if (x >= r.back()) {
      val = 0.0;
    } else if (x <= r.front()) {
      val = u[0] * std::pow(x / r.front(), -beta_minus);
    } else {
      while (r[j + 1] < x) ++j;
      const double uj1 = j + 1 < u.size() ? u[j + 1] : 0.0;
      const double th = std::log(x / r[j]) / std::log(r[j + 1] / r[j]);
      val = (1.0 - th) * u[j] + th * uj1;
    }
    v[i] = amp * val;
  }
  return v;
}

/// Golden-section search of J over dilations κ ∈ [1/8, 8]; returns the best profile.
inline bool improve_scale(const DiscreteEnergy& E, std::vector<double>& u, double& mu) {
  auto J = [&](double lk) { return E.energy(dilate(E, u, std::exp(lk))); };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -std::log(8.0), b = std::log(8.0);
  double c = b - g * (b - a), d = a + g * (b - a), fc = J(c), fd = J(d);
  for (int k = 0; k < 40; ++k) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = J(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = J(d);
    }
  }
  const double lk = 0.5 * (a + b);
  auto v = dilate(E, u, std::exp(lk));
  E.normalize(v);
  const double Jv = E.energy(v);
  if (Jv < mu * (1.0 - 1e-15)) {
    u = std::move(v);
    mu = Jv;
    return true;
  }
  return false;
}

}  // namespace detail

namespace detail {

/// Fixed-point sweeps with dilation searches, then Newton. Returns the final residual.
inline double relax(const DiscreteEnergy& E, std::vector<double>& u, double& mu, int& it,
                    const GroundStateOptions& opt) {
  double d = opt.damping;
  mu = E.energy(u);
  for (int outer = 0; outer < opt.outer_iterations; ++outer) {
    improve_scale(E, u, mu);
    for (int k = 0; k < opt.fixed_point_iterations; ++k, ++it) {
      auto w = solve(E.B, E.nonlinearity(u));
      E.normalize(w);
      std::vector<double> next(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) next[i] = (1.0 - d) * u[i] + d * w[i];
      E.normalize(next);
      const double mu_next = E.energy(next);
      if (mu_next > mu * (1.0 + 1e-15)) {
        d = std::max(0.5 * d, 1e-3);  // energy went up: shorter step
        continue;
      }
      u = std::move(next);
      mu = mu_next;
    }
    if (E.euler_lagrange_residual(u, mu) < opt.newton_start) break;
  }
  for (int k = 0; k < opt.newton_iterations; ++k, ++it) {
    if (E.euler_lagrange_residual(u, mu) < 1e-3 * opt.residual_tol) break;
    if (!newton_step(E, u, mu)) break;
  }
  E.normalize(u);
  mu = E.energy(u);
  return E.euler_lagrange_residual(u, mu);
}

inline std::vector<double> truncated_bubble(const DiscreteEnergy& E, double eps) {
  std::vector<double> u(E.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = E.grid.nodes[i];
    u[i] = cutoff(r, E.params.ball_radius) * eval_U_eps(E.params, eps, r);
  }
  E.normalize(u);
  return u;
}

}  // namespace detail

/// Radial minimizer of J on the ball. The first attempt starts from η U_ε with
/// ε = initial_eps_fraction·ρ. If it
/// stalls at or above μ_RN, the iteration restarts from the lowest-energy
/// truncated bubble on the grid and the outcome is reported as not attained.
inline GroundState ground_state(const ProblemParams& p, const RadialGrid& grid, const GroundStateOptions& opt = {}) {
  const DiscreteEnergy E(p, grid);
  if (negative_count(E.B) > 0) fail(ErrorKind::NegativeCoercivity, "lambda is at or above the first eigenvalue");

  GroundState gs;
  gs.initial_eps = opt.initial_eps_fraction * p.ball_radius;
  auto u = detail::truncated_bubble(E, gs.initial_eps);
  double mu = 0.0;
  int it = 0;
  double res = detail::relax(E, u, mu, it, opt);

  const double mu_rn = compute_mu_rn(p);
  if (!(res < opt.residual_tol) && mu >= mu_rn * (1.0 - 1e-6)) {
    // no minimizer in sight: follow the minimizing sequence from the best bubble
    double best_eps = gs.initial_eps, best = mu;
    for (int k = 2; p.ball_radius * std::pow(10.0, -0.25 * k) > grid.r0(); ++k) {
      const double eps = p.ball_radius * std::pow(10.0, -0.25 * k);
      const double J = E.energy(detail::truncated_bubble(E, eps));
      if (J < best) best = J, best_eps = eps;
    }
    auto v = detail::truncated_bubble(E, best_eps);
    double mv = 0.0;
    const double rv = detail::relax(E, v, mv, it, opt);
    if (mv < mu) {
      u = std::move(v);
      mu = mv;
      res = rv;
      gs.initial_eps = best_eps;
    }
    gs.attained = res < opt.residual_tol;
    if (!gs.attained && mu < mu_rn * (1.0 - 1e-6))
      fail(ErrorKind::NonConvergence, "ground-state iteration stalled below mu_RN, residual " + std::to_string(res));
  } else if (!(res < opt.residual_tol)) {
    fail(ErrorKind::NonConvergence, "ground-state iteration stalled, residual " + std::to_string(res));
  }
  for (double v : u)
    if (!(v > 0.0)) fail(ErrorKind::NonConvergence, "ground-state iterate lost positivity");
  gs.mu = mu;
  gs.residual = res;
  gs.iterations = it;
  gs.constraint_value = E.constraint(u);
  gs.concentration_score = concentration_score(E, u);
  gs.profile = detail::nodal_function(grid, u);
  return gs;
}

/// max (mu - J(v))/mu over random perturbations v = u(1 + a·bump) of the
/// profile. A nonpositive value means no trial went below mu.
inline double ground_state_trial_gap(const ProblemParams& p, const GroundState& gs, int trials, std::uint64_t seed) {
  const DiscreteEnergy E(p, gs.profile.grid);
  std::vector<double> u(gs.profile.values.begin(), gs.profile.values.end() - 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.05, 0.05), centre(0.0, 1.0), width(0.05, 0.5);
  double worst = -1e300;
  const double lr0 = std::log(E.grid.r0()), lR = std::log(E.grid.radius);
  for (int t = 0; t < trials; ++t) {
    const double a = amp(rng), c = lr0 + centre(rng) * (lR - lr0), w = width(rng) * (lR - lr0);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double z = (std::log(E.grid.nodes[i]) - c) / w;
      v[i] = u[i] * (1.0 + a * std::exp(-z * z));
    }
    worst = std::max(worst, gs.mu - E.energy(v));
  }
  return worst / gs.mu;
}

}  // namespace hardy
