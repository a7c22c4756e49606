#pragma once

#include <cmath>
#include <optional>

#include "hardy/params.hpp"
#include "hardy/radial.hpp"
#include "hardy/tridiag.hpp"

namespace hardy {

/// Quadratic forms over radial functions u on (0, ρ) with u(ρ) = 0:
///   a(u,u) = ∫ (u'² − (c/r² + h(r)) u²) r^k dr,   m(u,u) = ∫ u² r^k dr.
/// The unmeshed segment [0, r0] is modelled by u = u(r0)(r/r0)^corner_exponent.
struct FormSpec {
  double weight_power = 2.0;       ///< k
  double inverse_square = 0.0;     ///< c
  RadialPotential potential;       ///< h
  std::optional<double> corner_exponent;
};

/// Tridiagonal P1 finite-element pair over the nodes r_0 .. r_{N-2}; the last
/// node carries the Dirichlet condition and is eliminated.
struct RadialPencil {
  SymTridiag A;
  SymTridiag M;
};

inline RadialPencil assemble_forms(const RadialGrid& grid, const FormSpec& spec) {
  const auto& r = grid.nodes;
  const std::size_t N = r.size();
  if (N < 3) fail(ErrorKind::InvalidGrid, "need at least three nodes");
  const std::size_t U = N - 1;
  RadialPencil P;
  P.A.diag.assign(U, 0.0);
  P.A.off.assign(U - 1, 0.0);
  P.M.diag.assign(U, 0.0);
  P.M.off.assign(U - 1, 0.0);

  const double k = spec.weight_power;
  for (std::size_t e = 0; e + 1 < N; ++e) {
    const double a = r[e], b = r[e + 1], L = b - a;
    double s_rk = 0.0, m00 = 0.0, m01 = 0.0, m11 = 0.0, v00 = 0.0, v01 = 0.0, v11 = 0.0;
    const QuadratureRule rule = graded_gauss(a, b);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double x = rule.x[q];
      const double w = rule.w[q] * std::pow(x, k);
      const double pa = (b - x) / L, pb = (x - a) / L;
      const double pot = spec.inverse_square / (x * x) + spec.potential(x);
      s_rk += w;
      m00 += w * pa * pa;
      m01 += w * pa * pb;
      m11 += w * pb * pb;
      v00 += w * pot * pa * pa;
      v01 += w * pot * pa * pb;
      v11 += w * pot * pb * pb;
    }
    const double stiff = s_rk / (L * L);
    const double a00 = stiff - v00, a01 = -stiff - v01, a11 = stiff - v11;
    if (e < U) {
      P.A.diag[e] += a00;
      P.M.diag[e] += m00;
    }
    if (e + 1 < U) {
      P.A.diag[e + 1] += a11;
      P.M.diag[e + 1] += m11;
      P.A.off[e] += a01;
      P.M.off[e] += m01;
    }
  }

  if (spec.corner_exponent) {
    const double sig = *spec.corner_exponent;
    const double r0 = r.front();
    const double kin = sig * sig - spec.inverse_square;
    if (kin != 0.0) {
      const double e1 = 2.0 * sig + k - 1.0;
      if (!(e1 > 0.0)) fail(ErrorKind::NonIntegrable, "corner energy diverges");
      P.A.diag[0] += kin * std::pow(r0, k - 1.0) / e1;
    }
    const double e2 = 2.0 * sig + k + 1.0;
    if (!(e2 > 0.0)) fail(ErrorKind::NonIntegrable, "corner mass diverges");
    const double corner_mass = std::pow(r0, k + 1.0) / e2;
    P.M.diag[0] += corner_mass;
    P.A.diag[0] -= spec.potential.at_origin() * corner_mass;
  }
  return P;
}

/// Discretizes ∫(|∇u|² − (γ/|x|² + h)u²) and ∫u² over radial u vanishing at the
/// ball boundary (the common factor ω_{n-1} is dropped). Near the origin the
/// profile follows the regular branch r^{-β₋}.
inline RadialPencil assemble_operator(const ProblemParams& p, const RadialPotential& h, const RadialGrid& grid) {
  const Exponents e = compute_exponents(p);
  FormSpec spec;
  spec.weight_power = p.n - 1;
  spec.inverse_square = p.gamma;
  spec.potential = h;
  spec.corner_exponent = -e.beta_minus;
  return assemble_forms(grid, spec);
}

/// Forms of the weighted problem ∫|∇u|²|x|^{-2β₊} / ∫u²|x|^{-2β₊}.
inline RadialPencil assemble_weighted_operator(const ProblemParams& p, const RadialGrid& grid) {
  const Exponents e = compute_exponents(p);
  FormSpec spec;
  spec.weight_power = p.n - 1 - 2.0 * e.beta_plus;
  spec.corner_exponent = 0.0;
  return assemble_forms(grid, spec);
}

}  // namespace hardy
