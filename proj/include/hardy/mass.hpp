#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hardy/extremals.hpp"
#include "hardy/frobenius.hpp"
#include "hardy/params.hpp"
#include "hardy/radial.hpp"
#include "hardy/special.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

namespace detail {

inline void require_low_dimensional(const Exponents& e) {
  if (std::abs(e.gap - 2.0) < 1e-8) fail(ErrorKind::RegimeMismatch, "mass is undefined at gap = 2");
  if (!(e.gap < 2.0)) fail(ErrorKind::RegimeMismatch, "mass needs gap < 2");
}

}  // namespace detail

/// m = c₂/c₁ for H = y₊ + m·y₋ with H(ρ) = 0, from the two branch values at ρ.
inline double boundary_mass(const ProblemParams& p, const RadialPotential& h) {
  detail::require_low_dimensional(compute_exponents(p));
  const double rho[1] = {p.ball_radius};
  const auto yp = integrate_branch(p, h, Branch::Plus, rho);
  const auto ym = integrate_branch(p, h, Branch::Minus, rho);
  if (!(ym.y[0] > 0.0)) fail(ErrorKind::NotCoercive, "regular branch vanishes before the boundary");
  return -yp.y[0] / ym.y[0];
}

/// The singular solution H = y₊ + m·y₋ and the test-function correction
/// β = H - η r^{-β₊}, evaluated at arbitrary increasing radii.
struct SingularSolution {
  ProblemParams params;
  RadialPotential potential;
  double mass = 0.0;

  struct Samples {
    std::vector<double> H, dH, beta, dbeta;  ///< dbeta = r·β'(r)
  };

  Samples eval(std::span<const double> radii, double cutoff_radius) const {
    const Exponents e = compute_exponents(params);
    const auto yp = integrate_branch(params, potential, Branch::Plus, radii);
    const auto ym = integrate_branch(params, potential, Branch::Minus, radii);
    Samples s;
    const std::size_t N = radii.size();
    s.H.resize(N);
    s.dH.resize(N);
    s.beta.resize(N);
    s.dbeta.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double r = radii[i];
      s.H[i] = yp.y[i] + mass * ym.y[i];
      s.dH[i] = yp.dy[i] + mass * ym.dy[i];
      const double lead = std::pow(r, -e.beta_plus);
      const double eta = cutoff(r, cutoff_radius), reta = cutoff_log_derivative(r, cutoff_radius);
      // H - η r^{-β₊} = (y₊ - r^{-β₊}) + m y₋ + (1-η) r^{-β₊}
      s.beta[i] = yp.correction[i] + mass * ym.y[i] + (1.0 - eta) * lead;
      s.dbeta[i] = r * (yp.dcorrection[i] + mass * ym.dy[i]) - reta * lead - (1.0 - eta) * e.beta_plus * lead;
    }
    return s;
  }
};

struct MassResult {
  double c1 = 1.0;
  double c2 = 0.0;
  double mass = 0.0;
  std::pair<double, double> fit_window{0.0, 0.0};
  double fit_residual = 0.0;    ///< relative residual of the regression on the fit window
  double regression_mass = 0.0; ///< c₂/c₁ recovered by that regression (diagnostic)
  RadialFunction singular_solution;
};

/// Hardy-singular interior mass on the ball with potential h. Requires gap < 2
/// and coercivity of -Δ - γ/|x|² - h.
inline MassResult interior_mass(const ProblemParams& p, const RadialPotential& h, const RadialGrid& grid) {
  const Exponents e = compute_exponents(p);
  detail::require_low_dimensional(e);
  if (std::abs(grid.radius - p.ball_radius) > 1e-12 * p.ball_radius)
    fail(ErrorKind::InvalidGrid, "grid radius differs from the ball radius");
  const EigenResult coercive = lambda1_with_potential(p, h, grid);
  if (!(coercive.value > 1e-8)) fail(ErrorKind::NotCoercive, "first eigenvalue with the potential is not positive");

  SingularSolution S{p, h, boundary_mass(p, h)};
  const auto yp = integrate_branch(p, h, Branch::Plus, grid.nodes);
  const auto ym = integrate_branch(p, h, Branch::Minus, grid.nodes);
  MassResult out;
  out.c2 = out.mass = S.mass;
  out.singular_solution.grid = grid;
  auto& H = out.singular_solution.values;
  auto& dH = out.singular_solution.derivs;
  const std::size_t N = grid.size();
  H.resize(N);
  dH.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    H[i] = yp.y[i] + S.mass * ym.y[i];
    dH[i] = yp.dy[i] + S.mass * ym.dy[i];
  }
  H.back() = 0.0;
  out.singular_solution.boundary_value = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i)
    if (!(H[i] > 0.0)) fail(ErrorKind::SignViolation, "singular solution is not positive at r = " + std::to_string(grid.nodes[i]));

  // Diagnostic regression of r^{β₊}H on {1, r^gap, r², r^{2+gap}} over [2 r0, 20 r0].
  const double lo = 2.0 * grid.r0(), hi = 20.0 * grid.r0();
  out.fit_window = {lo, hi};
  std::vector<double> rs(40);
  for (int k = 0; k < 40; ++k) rs[k] = lo * std::pow(hi / lo, k / 39.0);
  const auto fp = integrate_branch(p, h, Branch::Plus, rs);
  const auto fm = integrate_branch(p, h, Branch::Minus, rs);
  Eigen::MatrixXd X(40, 4);
  Eigen::VectorXd y(40);
  for (int k = 0; k < 40; ++k) {
    const double r = rs[k];
    X(k, 0) = 1.0;
    X(k, 1) = std::pow(r, e.gap);
    X(k, 2) = r * r;
    X(k, 3) = r * r * std::pow(r, e.gap);
    y(k) = (fp.y[k] + S.mass * fm.y[k]) * std::pow(r, e.beta_plus);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  out.fit_residual = ((X * c - y).cwiseAbs().array() / y.cwiseAbs().array()).maxCoeff();
  out.regression_mass = c(1) / c(0);
  return out;
}

/// Closed-form mass for constant h = λ on B_ρ:
/// m = -ρ^{-2ν}(J_{-ν}(k)/J_ν(k))(k/2)^{2ν}Γ(1-ν)/Γ(1+ν), k = √λ ρ.
inline double mass_oracle_bessel(const ProblemParams& p, double lam) {
  const Exponents e = compute_exponents(p);
  detail::require_low_dimensional(e);
  if (!(lam > 0.0)) fail(ErrorKind::InvalidParams, "lambda must be positive");
  const double nu = e.nu, rho = p.ball_radius;
  const double k = std::sqrt(lam) * rho;
  if (!(k < bessel_first_zero(nu))) fail(ErrorKind::PoleCrossing, "lambda is at or beyond the first eigenvalue");
  namespace bm = boost::math;
  const double ratio = bm::cyl_bessel_j(-nu, k) / bm::cyl_bessel_j(nu, k);
  const double unit = -ratio * std::pow(0.5 * k, 2.0 * nu) * bm::tgamma(1.0 - nu) / bm::tgamma(1.0 + nu);
  return unit * std::pow(rho, -e.gap);
}

/// (first zero of J_{-ν})² / ρ².
inline double bessel_lambda_star(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  detail::require_low_dimensional(e);
  const double z = bessel_negative_order_first_zero(e.nu);
  return z * z / (p.ball_radius * p.ball_radius);
}

enum class ThresholdMethod { MassBisection, JanelliEigen, BesselOracle, ClosedFormMerely };

inline std::string to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::MassBisection: return "MassBisection";
    case ThresholdMethod::JanelliEigen: return "JanelliEigen";
    case ThresholdMethod::BesselOracle: return "BesselOracle";
    case ThresholdMethod::ClosedFormMerely: return "ClosedFormMerely";
  }
  return "?";
}

struct ThresholdReport {
  double lambda_star = 0.0;
  ThresholdMethod method = ThresholdMethod::MassBisection;
  std::pair<double, double> bracket{0.0, 0.0};
  std::map<std::string, double> cross_residuals;  ///< relative deviation per independent method
  double lambda1 = 0.0;
  /// The mass-zero characterization presumes the infimum is not attained at λ*.
  bool conditional = true;
};

/// λ* as the zero of λ ↦ m_{γ,λ}(B), bisected inside (1e-6 λ₁, 0.999 λ₁).
inline ThresholdReport lambda_star_by_mass(const ProblemParams& p, const RadialGrid& grid) {
  const Exponents e = compute_exponents(p);
  detail::require_low_dimensional(e);
  if (p.gamma < 0.0 && p.s == 0.0)
    fail(ErrorKind::RegimeMismatch, "merely singular threshold is governed by the Robin mass");
  ThresholdReport rep;
  rep.method = ThresholdMethod::MassBisection;
  rep.lambda1 = lambda1(p, grid).value;
  auto mass_at = [&](double lam) { return boundary_mass(p, RadialPotential::constant(lam)); };
  double lo = 1e-6 * rep.lambda1, hi = 0.999 * rep.lambda1;
  if (!(mass_at(lo) < 0.0) || !(mass_at(hi) > 0.0)) fail(ErrorKind::NoSignChange, "mass does not change sign below lambda1");
  while (hi - lo > 1e-8 * rep.lambda1) {
    const double mid = 0.5 * (lo + hi);
    (mass_at(mid) < 0.0 ? lo : hi) = mid;
  }
  rep.bracket = {lo, hi};
  rep.lambda_star = 0.5 * (lo + hi);
  const double bessel = bessel_lambda_star(p);
  const double janelli = janelli_lambda_star(p).value;
  rep.cross_residuals[to_string(ThresholdMethod::BesselOracle)] = std::abs(rep.lambda_star - bessel) / bessel;
  rep.cross_residuals[to_string(ThresholdMethod::JanelliEigen)] = std::abs(rep.lambda_star - janelli) / janelli;
  return rep;
}

inline ThresholdReport lambda_star_by_mass(const ProblemParams& p) {
  return lambda_star_by_mass(p, default_grid(p.ball_radius));
}

/// |γ|/ρ², the infimum of |γ|/|x|² over the ball.
inline double lambda_star_merely_singular_highdim(const ProblemParams& p) {
  p.validate();
  if (classify_regime(p).kind != SingularityKind::MerelySingular)
    fail(ErrorKind::RegimeMismatch, "needs s = 0 and gamma <= 0");
  if (p.n < 4) fail(ErrorKind::RegimeMismatch, "needs n >= 4");
  if (!(p.gamma < 0.0)) fail(ErrorKind::InvalidParams, "needs gamma < 0");
  return std::abs(p.gamma) / (p.ball_radius * p.ball_radius);
}

/// Relative defect of λ∫u² = (ρ/2)|∂B| u'(ρ)² for a radial solution of
/// -Δu - γu/|x|² - λu = μ u^{p-1}/|x|^s vanishing at ρ. u'(ρ) comes from the
/// integrated equation, ρ^{n-1}u'(ρ) = -∫(γu/r² + λu + μu^{p-1}r^{-s})r^{n-1}dr.
inline double pohozaev_residual(const ProblemParams& p, const RadialFunction& u, double mu) {
  const Exponents e = compute_exponents(p);
  const double P = e.two_star_s;
  const double lead = -e.beta_minus;
  const double w = sphere_area(p.n);
  const double rho = p.ball_radius;

  RadialFunction sq = u, nl = u;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    sq.values[i] = u.values[i] * u.values[i];
    nl.values[i] = std::pow(std::abs(u.values[i]), P - 2.0) * u.values[i];
  }
  const double l2 = quadrature(sq, p.n, 0.0, 2.0 * lead);
  const double flux = quadrature(u, p.n, -2.0, lead) * p.gamma + p.lam * quadrature(u, p.n, 0.0, lead) +
                      mu * quadrature(nl, p.n, -p.s, (P - 1.0) * lead);
  // flux carries ω; u'(ρ) = -flux / (ω ρ^{n-1})
  const double du = -flux / (w * std::pow(rho, p.n - 1));
  const double lhs = p.lam * l2;
  const double rhs = 0.5 * rho * w * std::pow(rho, p.n - 1) * du * du;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Local sub/supersolutions u = r^{-β} + μ r^{-β'} of -Δu - (γ + a r^θ)u/r²

enum class BetaChoice { Minus, Plus };
enum class SolutionSign { Sub, Super };

struct SubSuperReport {
  double beta = 0.0;
  double beta_prime = 0.0;
  double coefficient = 0.0;  ///< μ
  double delta = 0.0;        ///< largest verified radius
  bool verified = false;     ///< claimed strict sign and u > 0 at all 100 check radii
  bool exact = false;        ///< a = 0: r^{-β} solves the equation, no strict sign
  double max_abs_operator = 0.0;
};

inline SubSuperReport subsupersolution_check(const ProblemParams& p, double theta, BetaChoice choice, SolutionSign sign,
                                             double a = 1.0) {
  const Exponents e = compute_exponents(p);
  if (!(theta > 0.0 && theta < 1.0)) fail(ErrorKind::NoAdmissibleBetaPrime, "theta must lie in (0, 1)");
  SubSuperReport rep;
  rep.beta = choice == BetaChoice::Plus ? e.beta_plus : e.beta_minus;
  auto Q = [&](double b) { return b * (p.n - 2 - b) - p.gamma; };

  auto op = [&](double r, double mu, double bp) {
    const double b = rep.beta;
    const double u = std::pow(r, -b) + mu * std::pow(r, -bp);
    const double du = -b * std::pow(r, -b - 1) - mu * bp * std::pow(r, -bp - 1);
    const double ddu = b * (b + 1) * std::pow(r, -b - 2) + mu * bp * (bp + 1) * std::pow(r, -bp - 2);
    return std::pair{-ddu - (p.n - 1) * du / r - (p.gamma + a * std::pow(r, theta)) * u / (r * r), u};
  };

  if (a == 0.0) {
    rep.exact = true;
    rep.beta_prime = rep.beta;
    for (int i = 0; i < 100; ++i) {
      const double r = std::pow(10.0, -8.0 + 8.0 * i / 99.0);
      rep.max_abs_operator =
          std::max(rep.max_abs_operator, std::abs(op(r, 0.0, rep.beta).first) * std::pow(r, rep.beta + 2));
    }
    return rep;
  }

  double bp = rep.beta - 0.5 * theta;
  if (std::abs(Q(bp)) < 1e-6) bp = rep.beta - theta / 3.0;
  if (std::abs(Q(bp)) < 1e-6) fail(ErrorKind::NoAdmissibleBetaPrime, "no beta' with Q(beta') != 0");
  rep.beta_prime = bp;
  const double want = sign == SolutionSign::Super ? 1.0 : -1.0;
  const double mu_sign = want * (Q(bp) > 0.0 ? 1.0 : -1.0);

  auto holds = [&](double r, double mu) {
    const auto [L, u] = op(r, mu, bp);
    return u > 0.0 && want * L > 0.0;
  };
  // largest δ on a log ladder such that the sign holds on every ladder point below it
  auto reach = [&](double mu) {
    double last = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double r = std::pow(10.0, -12.0 + 13.0 * i / 4000.0);
      if (r > p.ball_radius) break;
      if (!holds(r, mu)) break;
      last = r;
    }
    return last;
  };
  double best = 0.0, best_mu = mu_sign;
  for (int k = -8; k <= 8; ++k) {
    const double mu = mu_sign * std::pow(10.0, 0.5 * k);
    const double d = reach(mu);
    if (d > best) {
      best = d;
      best_mu = mu;
    }
  }
  rep.coefficient = best_mu;
  rep.delta = best;
  if (best > 0.0) {
    rep.verified = true;
    for (int i = 0; i < 100; ++i) {
      const double r = best * std::pow(10.0, -6.0 + 6.0 * i / 99.0);
      rep.verified = rep.verified && holds(r, best_mu);
    }
  }
  return rep;
}

/// Two-coefficient fit of a whole-space solution of the unperturbed equation onto
/// r^{-β₋}, r^{-β₊}. The solution is integrated numerically from r = 1 with data
/// matching c₋r^{-β₋} + c₊r^{-β₊}.
struct EulerFitReport {
  double c_minus = 0.0;
  double c_plus = 0.0;
  double residual = 0.0;  ///< max relative deviation over the sample
};

inline EulerFitReport euler_combination_fit(const ProblemParams& p, double c_minus, double c_plus, double r_lo = 1e-3,
                                            double r_hi = 1e3, int samples = 200) {
  const Exponents e = compute_exponents(p);
  const RadialPotential zero = RadialPotential::zero();
  const double y0 = c_minus + c_plus, dy0 = -e.beta_minus * c_minus - e.beta_plus * c_plus;
  std::vector<double> inner, outer;
  for (int k = 0; k < samples; ++k) {
    const double r = r_lo * std::pow(r_hi / r_lo, k / double(samples - 1));
    (r < 1.0 ? inner : outer).push_back(r);
  }
  std::reverse(inner.begin(), inner.end());
  const auto in = integrate_radial_ode(p, zero, 1.0, y0, dy0, inner);
  const auto out = integrate_radial_ode(p, zero, 1.0, y0, dy0, outer);
  std::vector<double> rs, us;
  for (std::size_t k = inner.size(); k-- > 0;) {
    rs.push_back(inner[k]);
    us.push_back(in.y[k]);
  }
  for (std::size_t k = 0; k < outer.size(); ++k) {
    rs.push_back(outer[k]);
    us.push_back(out.y[k]);
  }
  // rows scaled by 1/u so the fit is relative
  Eigen::MatrixXd X(rs.size(), 2);
  Eigen::VectorXd y(rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    X(k, 0) = std::pow(rs[k], -e.beta_minus) / us[k];
    X(k, 1) = std::pow(rs[k], -e.beta_plus) / us[k];
    y(k) = 1.0;
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  EulerFitReport rep;
  rep.c_minus = c(0);
  rep.c_plus = c(1);
  rep.residual = (X * c - y).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace hardy
