#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardy/params.hpp"
#include "hardy/radial.hpp"

namespace hardy {

/// a = (2-s)/(n-2): U = (r^{aβ₋} + r^{aβ₊})^{-1/a}.
inline double extremal_shape_exponent(const ProblemParams& p) { return (2.0 - p.s) / (p.n - 2); }

namespace detail {

/// ln(e^x + e^y)
inline double log_add(double x, double y) {
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

/// ln U at t = ln r, together with b = -d ln U / dt and db/dt.
struct ExtremalLog {
  double log_u;
  double b;
  double db;
};

inline ExtremalLog extremal_log(const Exponents& e, double a, double t) {
  const double xm = a * e.beta_minus * t, xp = a * e.beta_plus * t;
  const double lD = log_add(xm, xp);
  const double wm = std::exp(xm - lD), wp = std::exp(xp - lD);
  return {-lD / a, e.beta_minus * wm + e.beta_plus * wp, a * e.gap * e.gap * wm * wp};
}

}  // namespace detail

/// Whole-space extremal U(r) = (r^{aβ₋} + r^{aβ₊})^{-1/a}.
inline double eval_U(const ProblemParams& p, double r) {
  const Exponents e = compute_exponents(p);
  if (r == 0.0) {
    if (e.beta_minus < 0.0) return 0.0;
    if (e.beta_minus == 0.0) return 1.0;
    fail(ErrorKind::InvalidParams, "U is unbounded at the origin when beta_minus > 0");
  }
  if (!(r > 0.0)) fail(ErrorKind::InvalidParams, "radius must be nonnegative");
  return std::exp(detail::extremal_log(e, extremal_shape_exponent(p), std::log(r)).log_u);
}

/// U_ε(r) = ε^{-(n-2)/2} U(r/ε).
inline double eval_U_eps(const ProblemParams& p, double eps, double r) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidParams, "eps must be positive");
  if (r == 0.0) return std::pow(eps, -0.5 * (p.n - 2)) * eval_U(p, 0.0);
  const Exponents e = compute_exponents(p);
  const auto v = detail::extremal_log(e, extremal_shape_exponent(p), std::log(r / eps));
  return std::exp(v.log_u - 0.5 * (p.n - 2) * std::log(eps));
}

/// -ΔU - γU/r², by exact differentiation in t = ln r.
inline double extremal_operator(const ProblemParams& p, double r) {
  const Exponents e = compute_exponents(p);
  const auto v = detail::extremal_log(e, extremal_shape_exponent(p), std::log(r));
  const double bracket = v.db - v.b * v.b + (p.n - 2) * v.b - p.gamma;
  return std::exp(v.log_u) * bracket / (r * r);
}

/// χ with -ΔU - γU/r² = χU^{p-1}/r^s, fitted at r = 1 and checked on [1e-3, 1e3].
inline double compute_chi(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  const double pm1 = e.two_star_s - 1.0;
  auto rhs_unit = [&](double r) { return std::pow(eval_U(p, r), pm1) * std::pow(r, -p.s); };
  const double chi = extremal_operator(p, 1.0) / rhs_unit(1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
    const double lhs = extremal_operator(p, r), rhs = chi * rhs_unit(r);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  if (!(worst < 1e-8) || !(chi > 0.0))
    fail(ErrorKind::ResidualTooLarge, "extremal equation residual " + std::to_string(worst));
  return chi;
}

/// Closed form of χ, (β₊-β₋)²(n-s)/(n-2).
inline double chi_closed_form(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  return e.gap * e.gap * (p.n - p.s) / (p.n - 2);
}

/// C² bump: 1 on [0, R/3], 0 on [2R/3, ∞), quintic smoothstep between.
inline double cutoff(double r, double R) {
  const double x = 3.0 * r / R - 1.0;
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

/// r·η'(r) for the bump above.
inline double cutoff_log_derivative(double r, double R) {
  const double x = 3.0 * r / R - 1.0;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double dx = 30.0 * x * x * (1.0 - x) * (1.0 - x);
  return -dx * 3.0 * r / R;
}

/// Whole-space integrals of the extremal, all including the factor ω_{n-1}.
struct ExtremalIntegrals {
  double gradient = 0.0;    ///< ∫|∇U|² - γU²/|x|²
  double constraint = 0.0;  ///< ∫U^p/|x|^s
  double l2 = 0.0;          ///< ∫U², +∞ unless gap > 2
};

inline ExtremalIntegrals extremal_integrals(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  const double a = extremal_shape_exponent(p);
  const double P = e.two_star_s;
  const double T = 40.0 / e.gap;
  const double width = 0.25 / (e.gap * std::max(1.0, a));
  const int panels = static_cast<int>(std::ceil(2.0 * T / width));
  const auto q = composite_gauss(-T, T, panels);
  ExtremalIntegrals I;
  const bool l2_finite = e.gap > 2.0;
  for (std::size_t k = 0; k < q.x.size(); ++k) {
    const double t = q.x[k];
    const auto v = detail::extremal_log(e, a, t);
    I.gradient += q.w[k] * std::exp(2.0 * v.log_u + (p.n - 2) * t) * (v.b * v.b - p.gamma);
    I.constraint += q.w[k] * std::exp(P * v.log_u + (p.n - p.s) * t);
    if (l2_finite) I.l2 += q.w[k] * std::exp(2.0 * v.log_u + p.n * t);
  }
  // Power-law tails beyond ±T, leading order.
  const double up = e.gap, uc = (1.0 + a) * e.gap;
  I.gradient += (e.beta_minus * e.beta_minus - p.gamma) * std::exp(-up * T) / up +
                (e.beta_plus * e.beta_plus - p.gamma) * std::exp(-up * T) / up;
  I.constraint += 2.0 * std::exp(-uc * T) / uc;
  const double w = sphere_area(p.n);
  I.gradient *= w;
  I.constraint *= w;
  if (l2_finite) {
    I.l2 += std::exp((p.n - 2.0 * e.beta_minus) * -T) / (p.n - 2.0 * e.beta_minus) +
            std::exp((p.n - 2.0 * e.beta_plus) * T) / (2.0 * e.beta_plus - p.n);
    I.l2 *= w;
  } else {
    I.l2 = INFINITY;
  }
  return I;
}

/// False when the explicit profile is only known to be the radial extremal
/// (γ < 0 with s > 0); the value returned by compute_mu_rn is then a radial infimum.
inline bool mu_rn_extremal_is_explicit(const ProblemParams& p) { return !(p.gamma < 0.0 && p.s > 0.0); }

/// μ_{γ,s,0}(ℝⁿ) = J(U). In the merely singular case the γ = 0 value is returned.
inline double compute_mu_rn(const ProblemParams& p) {
  p.validate();
  ProblemParams q = p;
  if (classify_regime(p).kind == SingularityKind::MerelySingular) q.gamma = 0.0;
  const auto I = extremal_integrals(q);
  return I.gradient / std::pow(I.constraint, 2.0 / compute_exponents(q).two_star_s);
}

}  // namespace hardy
