#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hardy/extremals.hpp"
#include "hardy/mass.hpp"
#include "hardy/params.hpp"

namespace hardy {

/// u_ε = η U_ε + w·β with w = ε^{gap/2} and β = H - η r^{-β₊} (low-dimensional
/// case only). η is the bump of `cutoff` with radius cutoff_radius.
struct TestFunctionSpec {
  double eps = 0.0;
  double cutoff_radius = 1.0;
  std::optional<SingularSolution> correction;
  double correction_weight = 0.0;
};

/// Test function for the constant potential h = λ; the correction is present iff gap < 2.
inline TestFunctionSpec make_test_function(const ProblemParams& p, double eps) {
  const Exponents e = compute_exponents(p);
  TestFunctionSpec spec;
  spec.eps = eps;
  spec.cutoff_radius = p.ball_radius;
  if (e.gap < 2.0) {
    const RadialPotential h = RadialPotential::constant(p.lam);
    spec.correction = SingularSolution{p, h, boundary_mass(p, h)};
    spec.correction_weight = std::pow(eps, 0.5 * e.gap);
  }
  return spec;
}

/// Integrals over the ball, each including ω_{n-1}.
struct EnergyBreakdown {
  double gradient = 0.0;      ///< ∫|∇u|²
  double hardy_linear = 0.0;  ///< ∫(γ/|x|² + λ)u²
  double constraint = 0.0;    ///< ∫|u|^p/|x|^s
  double value = 0.0;         ///< (gradient - hardy_linear) / constraint^{2/p}
};

/// J^B_{γ,s,λ}(u_ε) by Gauss quadrature in t = ln r, with the power-law
/// corner below r = ε·e^{-L} integrated in closed form.
inline EnergyBreakdown energy_of_test_function(const ProblemParams& p, const TestFunctionSpec& spec) {
  const Exponents e = compute_exponents(p);
  const double a = extremal_shape_exponent(p);
  const double rho = p.ball_radius, R = spec.cutoff_radius, eps = spec.eps;
  if (!(R > 0.0 && R <= rho * (1.0 + 1e-14))) fail(ErrorKind::InvalidParams, "cutoff radius must lie in (0, rho]");
  if (!(eps > 0.0 && eps < R / 3.0)) fail(ErrorKind::InvalidParams, "eps must lie in (0, R/3)");
  if (eps < 10.0 * 1e-6 * rho) fail(ErrorKind::BubbleUnresolved, "eps below 10 r0");
  const bool low = e.gap < 2.0;
  if (low != spec.correction.has_value())
    fail(ErrorKind::RegimeMismatch, "correction term must be supplied exactly when gap < 2");

  const double L = std::min(700.0, 40.0 / (e.gap * std::min(1.0, a)));
  const double width = 0.25 / (e.gap * std::max(1.0, a));
  const double t0 = std::log(eps) - L, t1 = std::log(R / 3.0), t2 = std::log(2.0 * R / 3.0), t3 = std::log(rho);
  QuadratureRule q = composite_gauss(t0, t1, static_cast<int>(std::ceil((t1 - t0) / width)));
  auto append = [&](double lo, double hi, int panels) {
    if (!(hi > lo)) return;
    const auto seg = composite_gauss(lo, hi, panels);
    q.x.insert(q.x.end(), seg.x.begin(), seg.x.end());
    q.w.insert(q.w.end(), seg.w.begin(), seg.w.end());
  };
  append(t1, t2, 40);
  append(t2, t3, 40);

  const std::size_t N = q.x.size();
  std::vector<double> radii(N);
  for (std::size_t i = 0; i < N; ++i) radii[i] = std::exp(q.x[i]);
  SingularSolution::Samples beta;
  if (low) beta = spec.correction->eval(radii, R);

  const double log_scale = -0.5 * (p.n - 2) * std::log(eps);
  const double P = e.two_star_s;
  auto profile = [&](std::size_t i, double t) {
    const double r = std::exp(t);
    const auto v = detail::extremal_log(e, a, t - std::log(eps));
    const double Ue = std::exp(v.log_u + log_scale);
    const double eta = cutoff(r, R);
    double u = eta * Ue;
    double ut = cutoff_log_derivative(r, R) * Ue - eta * v.b * Ue;
    if (low) {
      u += spec.correction_weight * beta.beta[i];
      ut += spec.correction_weight * beta.dbeta[i];
    }
    return std::pair{u, ut};
  };

  EnergyBreakdown out;
  for (std::size_t i = 0; i < N; ++i) {
    const double t = q.x[i];
    const auto [u, ut] = profile(i, t);
    const double vol = std::exp((p.n - 2) * t);
    out.gradient += q.w[i] * ut * ut * vol;
    out.hardy_linear += q.w[i] * (p.gamma + p.lam * std::exp(2.0 * t)) * u * u * vol;
    out.constraint += q.w[i] * std::pow(std::abs(u), P) * std::exp((p.n - p.s) * t);
  }
  // corner: u ≈ A r^{-β₋} below r_lo
  {
    const auto [u, ut] = profile(0, q.x.front());
    (void)ut;
    const double rlo = radii.front();
    const double A = u * std::pow(rlo, e.beta_minus);
    out.gradient += A * A * e.beta_minus * e.beta_minus * std::pow(rlo, e.gap) / e.gap;
    out.hardy_linear += A * A * (p.gamma * std::pow(rlo, e.gap) / e.gap + p.lam * std::pow(rlo, e.gap + 2) / (e.gap + 2));
    const double kc = (1.0 + a) * e.gap;
    out.constraint += std::pow(std::abs(A), P) * std::pow(rlo, kc) / kc;
  }
  const double w = sphere_area(p.n);
  out.gradient *= w;
  out.hardy_linear *= w;
  out.constraint *= w;
  out.value = (out.gradient - out.hardy_linear) / std::pow(out.constraint, 2.0 / P);
  return out;
}

enum class ExpansionRate { Gap, Square, SquareLog };

/// The order of J(u_ε) - μ_RN: ε^{gap} below gap 2, ε² above, ε²ln(1/ε) at gap = 2.
inline ExpansionRate expansion_rate(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  if (std::abs(e.gap - 2.0) < 1e-8) return ExpansionRate::SquareLog;
  return e.gap < 2.0 ? ExpansionRate::Gap : ExpansionRate::Square;
}

inline double expansion_gauge(const ProblemParams& p, double eps) {
  switch (expansion_rate(p)) {
    case ExpansionRate::Gap: return std::pow(eps, compute_exponents(p).gap);
    case ExpansionRate::Square: return eps * eps;
    case ExpansionRate::SquareLog: return eps * eps * std::log(1.0 / eps);
  }
  return 0.0;
}

/// Next order after the leading gauge, used as a nuisance column in the fit.
inline double expansion_next_gauge(const ProblemParams& p, double eps) {
  const double gap = compute_exponents(p).gap;
  switch (expansion_rate(p)) {
    case ExpansionRate::Gap: return std::pow(eps, std::min(2.0 * gap, 2.0));
    case ExpansionRate::Square: return std::pow(eps, std::min(gap, 4.0));
    case ExpansionRate::SquareLog: return eps * eps;
  }
  return 0.0;
}

/// All nuisance columns. Below gap 2 both ε² and ε^{2·gap} enter, with a
/// resonant ε²ln(1/ε) when they coincide (gap = 1). From gap 2 on, the
/// cutoff tails add ε^{2*(s)·gap/2}, only ε^{0.6} below the gauge for
/// n = 7, s = 1/2.
inline std::vector<double> expansion_nuisance(const ProblemParams& p, double eps) {
  const Exponents e = compute_exponents(p);
  const double gap = e.gap;
  std::vector<double> v{expansion_next_gauge(p, eps)};
  if (expansion_rate(p) == ExpansionRate::Gap) {
    if (std::abs(gap - 1.0) < 1e-6)
      v.push_back(eps * eps * std::log(1.0 / eps));
    else
      v.push_back(std::pow(eps, std::max(2.0 * gap, 2.0)));
    return v;
  }
  const double tail = 0.5 * e.two_star_s * gap;
  if (tail < 4.0) v.push_back(std::pow(eps, tail));
  return v;
}

struct SlopeFit {
  ExpansionRate rate = ExpansionRate::Gap;
  double intercept = 0.0;  ///< μ_RN, held fixed
  double slope = 0.0;      ///< coefficient of the leading gauge
  double next = 0.0;       ///< coefficient of the first nuisance term
  double rms = 0.0;
  std::vector<double> eps, energy;
};

/// Default ladder ε = 2^{-k}, k = 6..12, scaled by the ball radius.
inline std::vector<double> default_eps_ladder(double rho = 1.0) {
  std::vector<double> v;
  for (int k = 6; k <= 12; ++k) v.push_back(rho * std::ldexp(1.0, -k));
  return v;
}

/// Least-squares fit J(u_ε) - μ_RN ≈ slope·g(ε) + next·g₂(ε) over an ε ladder.
inline SlopeFit fit_expansion(const ProblemParams& p, const std::vector<double>& ladder) {
  SlopeFit f;
  f.rate = expansion_rate(p);
  f.eps = ladder;
  f.intercept = compute_mu_rn(p);
  const std::size_t K = ladder.size();
  const std::size_t C = 1 + expansion_nuisance(p, ladder.front()).size();
  if (K < C + 1) fail(ErrorKind::InvalidParams, "eps ladder too short for the expansion fit");
  Eigen::MatrixXd X(K, C);
  Eigen::VectorXd y(K);
  // from gap 2 on the leading gauge comes from λ‖u_ε‖₂² alone and J is
  // affine in λ, so fitting J(λ) - J(0) keeps the λ-free ε^{gap} terms out
  // of a nearly collinear ε²ln(1/ε) / ε² pair
  const bool lambda_part = f.rate != ExpansionRate::Gap;
  const ProblemParams p0 = p.with_lambda(0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double J = energy_of_test_function(p, make_test_function(p, ladder[k])).value;
    f.energy.push_back(J);
    X(k, 0) = expansion_gauge(p, ladder[k]);
    const auto extra = expansion_nuisance(p, ladder[k]);
    for (std::size_t c = 0; c < extra.size(); ++c) X(k, c + 1) = extra[c];
    y(k) = J - (lambda_part ? energy_of_test_function(p0, make_test_function(p0, ladder[k])).value : f.intercept);
  }
  // column scaling keeps the least-squares problem well conditioned
  Eigen::VectorXd s(C);
  for (std::size_t c = 0; c < C; ++c) {
    s(c) = X.col(c).cwiseAbs().maxCoeff();
    X.col(c) /= s(c);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  f.slope = c(0) / s(0);
  f.next = c(1) / s(1);
  f.rms = std::sqrt((X * c - y).squaredNorm() / K);
  return f;
}

inline SlopeFit fit_expansion(const ProblemParams& p) { return fit_expansion(p, default_eps_ladder(p.ball_radius)); }

}  // namespace hardy
