#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hardy/params.hpp"
#include "hardy/radial.hpp"

namespace hardy {

enum class Branch { Plus, Minus };

/// Local solution r^σ Σ_k a_k r^k of u'' + (n-1)u'/r + (γ/r² + h(r))u = 0 near 0,
/// with σ = -β₊ (Plus) or σ = -β₋ (Minus) and a_0 = 1.
struct FrobeniusBranch {
  double indicial_exponent = 0.0;
  std::vector<double> series_coeffs;
  int truncation_order = 12;
  double start_radius = 0.0;
  double switch_radius = 0.0;          ///< series is used up to here, the integrator beyond
  double max_recurrence_residual = 0.0;
  double truncation_estimate = 0.0;    ///< relative size of the dropped tail at switch_radius
};

struct FrobeniusOptions {
  int truncation_order = 12;
  double rel_tol = 1e-13;
  double series_tail_tol = 1e-17;
  double max_switch_fraction = 0.25;  ///< switch radius never exceeds this fraction of the last radius
};

/// Indicial polynomial P(t) = t² + (n-2)t + γ, with roots -β₊ and -β₋.
inline double indicial_polynomial(const ProblemParams& p, double t) { return t * t + (p.n - 2) * t + p.gamma; }

inline FrobeniusBranch frobenius_series(const ProblemParams& p, const RadialPotential& h, Branch branch,
                                        const FrobeniusOptions& opt = {}) {
  const Exponents e = compute_exponents(p);
  FrobeniusBranch fb;
  fb.indicial_exponent = branch == Branch::Plus ? -e.beta_plus : -e.beta_minus;
  fb.truncation_order = opt.truncation_order;
  const int K = opt.truncation_order;
  auto& a = fb.series_coeffs;
  a.assign(static_cast<std::size_t>(K) + 1, 0.0);
  a[0] = 1.0;
  auto forcing = [&](int k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < h.coeffs.size(); ++j) {
      const int idx = k - 2 - static_cast<int>(j);
      if (idx >= 0 && idx <= K) acc += h.coeffs[j] * a[static_cast<std::size_t>(idx)];
    }
    return acc;
  };
  double scale = 1.0;
  for (int k = 1; k <= K; ++k) {
    const double P = indicial_polynomial(p, fb.indicial_exponent + k);
    const double rhs = -forcing(k);
    // P(σ+k) = k(k ∓ gap): vanishes only on the Plus branch when gap = k.
    if (std::abs(P) < 1e-8 * k) {
      if (std::abs(rhs) > 1e-300)
        fail(ErrorKind::ResonantIndicialGap, "indicial exponents differ by the integer " + std::to_string(k));
      a[k] = 0.0;
      continue;
    }
    a[k] = rhs / P;
    scale = std::max(scale, std::abs(rhs));
    const double resid = std::abs(a[k] * P - rhs) / scale;
    fb.max_recurrence_residual = std::max(fb.max_recurrence_residual, resid);
  }
  return fb;
}

/// Samples of one branch: value y, derivative y', and y - r^σ (computed without
/// cancellation inside the series zone).
struct BranchSamples {
  FrobeniusBranch series;
  std::vector<double> r, y, dy, correction, dcorrection;  ///< dcorrection = (y - r^σ)'
};

namespace detail {

struct SeriesValue {
  double y, dy, corr, dcorr;
};

inline SeriesValue eval_series(const FrobeniusBranch& fb, double r) {
  const double sig = fb.indicial_exponent;
  double S = 0.0, dS = 0.0;
  double rk = r;
  for (std::size_t k = 1; k < fb.series_coeffs.size(); ++k) {
    const double term = fb.series_coeffs[k] * rk;
    S += term;
    dS += (sig + k) * term;
    rk *= r;
  }
  const double rs = std::pow(r, sig);
  return {rs * (1.0 + S), rs * (sig + dS) / r, rs * S, rs * dS / r};
}

}  // namespace detail

struct OdeSamples {
  std::vector<double> y, dy;
};

/// Integrates the radial equation from (r_start, y, y') to each of `radii`, which
/// must be monotone and on one side of r_start. Adaptive Runge-Kutta-Fehlberg
/// 7(8) in t = ln r on the state (y, r y').
inline OdeSamples integrate_radial_ode(const ProblemParams& p, const RadialPotential& h, double r_start, double y0,
                                       double dy0, std::span<const double> radii, double rel_tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  OdeSamples out;
  const std::size_t N = radii.size();
  out.y.resize(N);
  out.dy.resize(N);
  if (N == 0) return out;
  const double gam = p.gamma;
  const int n = p.n;
  auto rhs = [&](const State& x, State& dxdt, double t) {
    const double r = std::exp(t);
    dxdt[0] = x[1];
    dxdt[1] = -(n - 2) * x[1] - (gam + h(r) * r * r) * x[0];
  };
  std::vector<double> times;
  times.reserve(N + 1);
  times.push_back(std::log(r_start));
  for (double r : radii) times.push_back(std::log(r));
  const bool forward = times.back() >= times.front();
  for (std::size_t j = 1; j < times.size(); ++j) {
    const bool ok = forward ? times[j] >= times[j - 1] : times[j] <= times[j - 1];
    if (!ok) fail(ErrorKind::InvalidGrid, "radii must be monotone away from the start radius");
  }
  // integrate_times needs strictly monotone times
  for (std::size_t j = 1; j < times.size(); ++j)
    if (times[j] == times[j - 1]) times[j] = std::nextafter(times[j - 1], forward ? 1e300 : -1e300);

  State x{y0, dy0 * r_start};
  const double abs_tol = 1e-3 * rel_tol * std::max(std::abs(y0), std::abs(dy0 * r_start));
  auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_fehlberg78<State>());
  std::size_t obs = 0;
  auto observer = [&](const State& s, double) {
    if (obs > 0) {
      out.y[obs - 1] = s[0];
      out.dy[obs - 1] = s[1] / radii[obs - 1];
    }
    ++obs;
  };
  try {
    const double span = std::abs(times.back() - times.front());
    const double dt0 = (forward ? 1.0 : -1.0) * std::min(1e-3, 0.5 * span + 1e-12);
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer, ode::max_step_checker(2000000));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    fail(ErrorKind::StepFailure, std::string("radial integration failed: ") + ex.what());
  }
  for (std::size_t j = 0; j < N; ++j)
    if (!std::isfinite(out.y[j]) || !std::isfinite(out.dy[j])) fail(ErrorKind::StepFailure, "non-finite solution value");
  return out;
}

/// Evaluates a branch at increasing radii: the Frobenius series inside the switch
/// radius, adaptive Runge-Kutta-Fehlberg 7(8) in t = ln r beyond it.
inline BranchSamples integrate_branch(const ProblemParams& p, const RadialPotential& h, Branch branch,
                                      std::span<const double> radii, const FrobeniusOptions& opt = {}) {
  if (radii.empty()) fail(ErrorKind::InvalidGrid, "no radii requested");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) fail(ErrorKind::InvalidGrid, "radii must be strictly increasing");
  if (!(radii.front() > 0.0)) fail(ErrorKind::InvalidGrid, "radii must be positive");

  BranchSamples out;
  out.series = frobenius_series(p, h, branch, opt);
  FrobeniusBranch& fb = out.series;
  fb.start_radius = radii.front();

  // Largest radius where the last retained terms are below the tail tolerance.
  const int K = fb.truncation_order;
  double r_switch = opt.max_switch_fraction * radii.back();
  for (int k = std::max(1, K - 1); k <= K; ++k) {
    const double ak = std::abs(fb.series_coeffs[k]);
    if (ak > 0.0) r_switch = std::min(r_switch, std::pow(opt.series_tail_tol / ak, 1.0 / k));
  }
  fb.switch_radius = r_switch;
  {
    double tail = 0.0, rk = std::pow(r_switch, K + 1);
    for (int k = K + 1; k <= K + 2 + static_cast<int>(h.coeffs.size()); ++k, rk *= r_switch) {
      double acc = 0.0;
      for (std::size_t j = 0; j < h.coeffs.size(); ++j) {
        const int idx = k - 2 - static_cast<int>(j);
        if (idx >= 0 && idx <= K) acc += h.coeffs[j] * fb.series_coeffs[idx];
      }
      tail += std::abs(acc) * rk * r_switch * r_switch;
    }
    fb.truncation_estimate = tail;
  }

  const std::size_t N = radii.size();
  out.r.assign(radii.begin(), radii.end());
  out.y.resize(N);
  out.dy.resize(N);
  out.correction.resize(N);
  out.dcorrection.resize(N);

  std::size_t i = 0;
  for (; i < N && radii[i] <= r_switch; ++i) {
    const auto v = detail::eval_series(fb, radii[i]);
    out.y[i] = v.y;
    out.dy[i] = v.dy;
    out.correction[i] = v.corr;
    out.dcorrection[i] = v.dcorr;
  }
  if (i == N) return out;

  const auto start = detail::eval_series(fb, r_switch);
  std::vector<double> outer(radii.begin() + static_cast<std::ptrdiff_t>(i), radii.end());
  const auto tail = integrate_radial_ode(p, h, r_switch, start.y, start.dy, outer, opt.rel_tol);
  for (std::size_t j = i; j < N; ++j) {
    out.y[j] = tail.y[j - i];
    out.dy[j] = tail.dy[j - i];
    const double lead = std::pow(radii[j], fb.indicial_exponent);
    out.correction[j] = out.y[j] - lead;
    out.dcorrection[j] = out.dy[j] - fb.indicial_exponent * lead / radii[j];
  }
  return out;
}

/// Branch with prescribed behavior r^{-β±} at 0, sampled on a geometric grid
/// from r0 = 1e-6·ball_radius to r_end.
inline RadialFunction frobenius_solve(const ProblemParams& p, const RadialPotential& h, Branch branch, double r_end,
                                      int count = 2001, const FrobeniusOptions& opt = {}) {
  if (!(r_end <= p.ball_radius * (1.0 + 1e-14)))
    fail(ErrorKind::InvalidGrid, "r_end must not exceed the ball radius");
  RadialFunction f;
  f.grid = make_grid(r_end, count, Grading::Geometric, std::min(1e-6 * p.ball_radius, 0.5 * r_end));
  const auto s = integrate_branch(p, h, branch, f.grid.nodes, opt);
  f.values = s.y;
  f.derivs = s.dy;
  f.boundary_value = s.y.back();
  return f;
}

}  // namespace hardy
