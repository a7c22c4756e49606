#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hardy/expansion.hpp"
#include "hardy/mass.hpp"
#include "hardy/robin3d.hpp"
#include "hardy/special.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

struct CheckResult {
  std::string name;
  std::string module;
  bool passed = false;
  double runtime = 0.0;  ///< seconds
  double budget = 0.0;   ///< seconds
  std::map<std::string, double> metrics;
  std::string note;
};

/// Resolution knobs; coarser values make the suite faster and can make it fail.
struct AcceptanceConfig {
  int radial_nodes = 2001;
  int axi_cells = 256;
  std::uint64_t seed = 20240521;
  std::set<std::string> modules;  ///< empty = all
};

namespace detail {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <class F>
CheckResult timed(std::string name, std::string module, double budget, F&& body) {
  CheckResult r;
  r.name = std::move(name);
  r.module = std::move(module);
  r.budget = budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.note = std::string("error: ") + e.what();
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.runtime > r.budget) {
    r.passed = false;
    r.note += (r.note.empty() ? "" : "; ") + std::string("over time budget");
  }
  return r;
}

/// Admissible γ with gap < 2 for dimension n: γ ∈ ((n-2)²/4 - 1, (n-2)²/4).
inline double low_dim_gamma(int n, double u) { return 0.25 * (n - 2) * (n - 2) - (1.0 - 1e-3) * u * u - 1e-4; }

}  // namespace detail

inline CheckResult check_exponent_identities(const AcceptanceConfig& cfg) {
  return detail::timed("exponent identities", "params", 1.0, [&](CheckResult& r) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> dim(3, 12);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const int n = dim(rng);
      const double H = 0.25 * (n - 2) * (n - 2);
      const ProblemParams p{n, H - (H + 4.0) * U(rng) - 1e-9, 0.0, 0.0, 1.0};
      const Exponents e = compute_exponents(p);
      worst = std::max({worst, std::abs(e.beta_plus * (n - 2 - e.beta_plus) - p.gamma),
                        std::abs(e.beta_minus * (n - 2 - e.beta_minus) - p.gamma),
                        std::abs(e.beta_plus + e.beta_minus - (n - 2))});
    }
    r.metrics["max_abs_deviation"] = worst;
    r.passed = worst < 1e-12;
  });
}

inline CheckResult check_euler_mass(const AcceptanceConfig& cfg) {
  return detail::timed("Euler mass", "mass_threshold", 10.0, [&](CheckResult& r) {
    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const int n = 3 + k % 4;
      const ProblemParams p{n, detail::low_dim_gamma(n, 0.05 + 0.9 * U(rng)), 0.0, 0.0, 0.5 + 2.5 * U(rng)};
      const auto m = interior_mass(p, RadialPotential::zero(), default_grid(p.ball_radius, cfg.radial_nodes));
      const double exact = -std::pow(p.ball_radius, -compute_exponents(p).gap);
      worst = std::max(worst, detail::rel(m.mass, exact));
    }
    r.metrics["max_rel_deviation"] = worst;
    r.passed = worst < 1e-8;
  });
}

/// Cases shared by the Bessel and mass-property checks.
inline std::vector<ProblemParams> low_dim_cases() {
  return {{3, 0.0, 0.0, 0.0, 1.0}, {4, 0.75, 0.0, 0.0, 1.0}, {3, 0.15, 0.0, 0.0, 2.0}, {5, 1.6, 0.5, 0.0, 1.0},
          {3, -0.5, 1.0, 0.0, 0.7}};
}

inline CheckResult check_bessel_agreement(const AcceptanceConfig& cfg) {
  return detail::timed("Bessel oracle agreement", "mass_threshold", 30.0, [&](CheckResult& r) {
    double worst = 0.0;
    for (const auto& p : low_dim_cases()) {
      const double nu = compute_exponents(p).nu;
      const double l1 = std::pow(bessel_first_zero(nu) / p.ball_radius, 2);
      const double scale = std::pow(p.ball_radius, -compute_exponents(p).gap);  // |m| at λ = 0
      const RadialGrid g = default_grid(p.ball_radius, cfg.radial_nodes);
      for (int k = 1; k <= 20; ++k) {
        const double lam = l1 * k / 21.0;
        const double m = interior_mass(p, RadialPotential::constant(lam), g).mass;
        const double o = mass_oracle_bessel(p, lam);
        worst = std::max(worst, std::abs(m - o) / std::max(std::abs(o), scale));
      }
    }
    r.metrics["max_rel_deviation"] = worst;
    r.passed = worst < 1e-6;
  });
}

inline std::vector<ProblemParams> threshold_cases() {
  return {{3, 0.0, 0.0, 0.0, 1.0},  {4, 0.75, 0.0, 0.0, 1.0}, {3, 0.1, 0.0, 0.0, 1.0}, {3, 0.2, 0.0, 0.0, 1.0},
          {4, 0.5, 0.0, 0.0, 1.0},  {4, 0.95, 0.0, 0.0, 1.0}, {5, 1.5, 0.0, 0.0, 1.0}, {5, 2.2, 0.0, 0.0, 1.0},
          {6, 3.5, 0.0, 0.0, 1.0},  {3, -0.5, 0.5, 0.0, 1.0}};
}

inline CheckResult check_threshold_triple(const AcceptanceConfig& cfg) {
  return detail::timed("threshold triple agreement", "mass_threshold", 120.0, [&](CheckResult& r) {
    double worst = 0.0;
    for (const auto& p : threshold_cases()) {
      const auto rep = lambda_star_by_mass(p, default_grid(p.ball_radius, cfg.radial_nodes));
      const double bessel = bessel_lambda_star(p);
      const double janelli = janelli_lambda_star(p, weighted_problem_grid(p.ball_radius, cfg.radial_nodes)).value;
      worst = std::max({worst, detail::rel(rep.lambda_star, bessel), detail::rel(janelli, bessel)});
      if (p.n == 3 && p.gamma == 0.0)
        r.metrics["n3_gamma0"] = rep.lambda_star, worst = std::max(worst, detail::rel(rep.lambda_star, 0.25 * std::numbers::pi * std::numbers::pi));
      if (p.n == 4 && p.gamma == 0.75)
        r.metrics["n4_gamma075"] = rep.lambda_star, worst = std::max(worst, detail::rel(rep.lambda_star, 0.25 * std::numbers::pi * std::numbers::pi));
    }
    r.metrics["max_rel_deviation"] = worst;
    r.passed = worst < 1e-3;
  });
}

inline CheckResult check_lambda1_oracle(const AcceptanceConfig& cfg) {
  return detail::timed("lambda1 oracle", "spectral", 60.0, [&](CheckResult& r) {
    const std::vector<ProblemParams> cases{{3, 0.0, 0, 0, 1.0},   {3, 0.2, 0, 0, 1.0},  {3, -1.0, 0, 0, 1.0},
                                           {4, 0.0, 0, 0, 1.0},   {4, 0.9, 0, 0, 2.0},  {5, 2.0, 0, 0, 1.0},
                                           {5, -3.0, 0, 0, 0.5},  {6, 3.9, 0, 0, 1.0},  {7, 0.0, 0, 0, 1.5},
                                           {3, 0.24, 0, 0, 1.0}};
    double worst = 0.0;
    for (const auto& p : cases) {
      const double l1 = lambda1(p, default_grid(p.ball_radius, cfg.radial_nodes)).value;
      const double o = std::pow(bessel_first_zero(compute_exponents(p).nu) / p.ball_radius, 2);
      worst = std::max(worst, detail::rel(l1, o));
      if (p.n == 3 && p.gamma == 0.0) r.metrics["n3_gamma0"] = l1;
    }
    r.metrics["max_rel_deviation"] = worst;
    r.passed = worst < 1e-6;
  });
}

inline CheckResult check_mass_properties(const AcceptanceConfig& cfg) {
  return detail::timed("mass properties", "mass_threshold", 60.0, [&](CheckResult& r) {
    bool monotone_lambda = true, monotone_rho = true, negative_at_zero = true;
    double worst_modulus_spread = 0.0;
    for (const auto& p : low_dim_cases()) {
      const double nu = compute_exponents(p).nu;
      const double l1 = std::pow(bessel_first_zero(nu) / p.ball_radius, 2);
      const RadialGrid g = default_grid(p.ball_radius, cfg.radial_nodes);
      auto m_at = [&](double lam) { return interior_mass(p, RadialPotential::constant(lam), g).mass; };
      double prev = -INFINITY;
      for (int k = 0; k < 10; ++k) {
        const double m = m_at(l1 * k / 10.5);
        if (k == 0 && !(m < 0.0)) negative_at_zero = false;
        if (!(m > prev)) monotone_lambda = false;
        prev = m;
      }
      // ρ ladder at fixed λ below λ₁ of the largest ball
      const double lam = 0.4 * l1 / 1.5 / 1.5;
      prev = -INFINITY;
      for (int k = 0; k < 6; ++k) {
        const ProblemParams q = p.with_radius(p.ball_radius * (1.0 + 0.1 * k));
        const double m = interior_mass(q, RadialPotential::constant(lam), default_grid(q.ball_radius, cfg.radial_nodes)).mass;
        if (!(m > prev)) monotone_rho = false;
        prev = m;
      }
      // |m(λ+δ) - m(λ)|/δ should settle as δ shrinks
      const double base = 0.3 * l1, m0 = m_at(base);
      std::vector<double> q;
      for (double d : {1e-2, 1e-3, 1e-4}) q.push_back(std::abs(m_at(base + d * l1) - m0) / (d * l1));
      worst_modulus_spread = std::max(worst_modulus_spread, *std::max_element(q.begin(), q.end()) /
                                                                *std::min_element(q.begin(), q.end()));
    }
    r.metrics["lambda_monotone"] = monotone_lambda;
    r.metrics["radius_monotone"] = monotone_rho;
    r.metrics["negative_at_zero"] = negative_at_zero;
    r.metrics["modulus_spread"] = worst_modulus_spread;
    r.passed = monotone_lambda && monotone_rho && negative_at_zero && worst_modulus_spread < 1.1;
  });
}

inline CheckResult check_high_dim_threshold_zero(const AcceptanceConfig& cfg) {
  (void)cfg;
  return detail::timed("high-dimensional threshold zero", "extremals", 120.0, [&](CheckResult& r) {
    const ProblemParams p{5, 0.5, 0.5, 0.0, 1.0};
    const double l1 = lambda1(p).value, mu = compute_mu_rn(p);
    bool all = true;
    for (double f : {0.1, 0.5, 1.0}) {
      // λ = λ₁ itself is not coercive; stay a hair below
      const ProblemParams q = p.with_lambda(std::min(f, 1.0 - 1e-6) * l1);
      double best = INFINITY;
      for (double eps : default_eps_ladder(p.ball_radius))
        best = std::min(best, energy_of_test_function(q, make_test_function(q, eps)).value);
      r.metrics["min_J_minus_muRN_at_" + std::to_string(f).substr(0, 3)] = best - mu;
      all = all && best < mu;
    }
    r.passed = all;
  });
}

inline CheckResult check_sign_law(const AcceptanceConfig& cfg) {
  (void)cfg;
  return detail::timed("expansion sign law", "extremals", 300.0, [&](CheckResult& r) {
    const std::vector<ProblemParams> cases{{3, 0.0, 0.0, 0.0, 1.0}, {4, 0.75, 0.0, 0.0, 1.0}, {3, -0.5, 1.0, 0.0, 1.0}};
    bool signs = true, flat = true;
    double worst_ratio = 0.0;
    for (const auto& p : cases) {
      const double ls = bessel_lambda_star(p);
      for (double f : {0.5, 1.5}) {
        const ProblemParams q = p.with_lambda(f * ls);
        const double slope = fit_expansion(q).slope;
        const double m = mass_oracle_bessel(q, q.lam);
        if (!(slope * m < 0.0)) signs = false;
      }
      const double s_star = fit_expansion(p.with_lambda(ls)).slope;
      const double s_12 = fit_expansion(p.with_lambda(1.2 * ls)).slope;
      worst_ratio = std::max(worst_ratio, std::abs(s_star) / std::abs(s_12));
      if (!(std::abs(s_star) < 0.1 * std::abs(s_12))) flat = false;
    }
    r.metrics["signs_ok"] = signs;
    r.metrics["max_slope_ratio_at_threshold"] = worst_ratio;
    r.passed = signs && flat;
  });
}

/// Ground states on the ladder {0, 0.5, 0.8, 1.2, 1.5}·λ* for n = 3, γ = 0, on
/// the configured grid and its refinement. Shared by the two checks below.
struct GroundStateLadder {
  std::vector<double> lambdas;
  std::vector<GroundState> coarse, fine;
  ProblemParams params;
};

inline GroundStateLadder ground_state_ladder(const AcceptanceConfig& cfg) {
  GroundStateLadder L;
  L.params = ProblemParams{3, 0.0, 0.0, 0.0, 1.0};
  const double ls = bessel_lambda_star(L.params);
  const RadialGrid g = default_grid(1.0, cfg.radial_nodes), gf = refine(g);
  for (double f : {0.0, 0.5, 0.8, 1.2, 1.5}) {
    L.lambdas.push_back(f * ls);
    L.coarse.push_back(ground_state(L.params.with_lambda(f * ls), g));
    L.fine.push_back(ground_state(L.params.with_lambda(f * ls), gf));
  }
  return L;
}

inline CheckResult check_ground_state_threshold(const GroundStateLadder& L) {
  return detail::timed("ground-state threshold behavior", "spectral", 600.0, [&](CheckResult& r) {
    const double mu = compute_mu_rn(L.params);
    bool monotone = true;
    for (std::size_t k = 1; k < L.coarse.size(); ++k)
      monotone = monotone && L.coarse[k].mu <= L.coarse[k - 1].mu && L.fine[k].mu <= L.fine[k - 1].mu;
    const std::size_t i12 = 3, i08 = 2;
    const double dc = mu - L.coarse[i12].mu, df = mu - L.fine[i12].mu;
    const bool deficit = dc >= 1e-3 * mu && df >= 1e-3 * mu && std::abs(dc - df) < 0.05 * df;
    const double cc = L.coarse[i08].concentration_score, cf = L.fine[i08].concentration_score;
    const bool concentrates = cf > 0.99 && cf >= cc;
    r.metrics["mu_nonincreasing"] = monotone;
    r.metrics["deficit_1.2_coarse"] = dc / mu;
    r.metrics["deficit_1.2_fine"] = df / mu;
    r.metrics["concentration_0.8_coarse"] = cc;
    r.metrics["concentration_0.8_fine"] = cf;
    r.passed = monotone && deficit && concentrates;
    if (!concentrates) r.note = "no concentration to the grid scale below the threshold";
  });
}

inline CheckResult check_pohozaev(const GroundStateLadder& L) {
  return detail::timed("Pohozaev", "mass_threshold", 60.0, [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t k = 0; k < L.lambdas.size(); ++k) {
      const ProblemParams q = L.params.with_lambda(L.lambdas[k]);
      const double a = pohozaev_residual(q, L.coarse[k].profile, L.coarse[k].mu);
      const double b = pohozaev_residual(q, L.fine[k].profile, L.fine[k].mu);
      r.metrics["residual_" + std::to_string(k)] = std::max(a, b);
      worst = std::max({worst, a, b});
    }
    // corrupt the attained state at 1.2 λ* by 1% inside r < 0.1
    const ProblemParams q = L.params.with_lambda(L.lambdas[3]);
    RadialFunction u = L.coarse[3].profile;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (u.grid.nodes[i] < 0.1) u.values[i] *= 1.01;
    const double corrupted = pohozaev_residual(q, u, L.coarse[3].mu);
    r.metrics["max_residual"] = worst;
    r.metrics["corrupted_residual"] = corrupted;
    r.passed = worst < 1e-3 && corrupted > 1e-2;
    if (!(worst < 1e-3)) r.note = "identity fails on the non-attained states below the threshold";
  });
}

inline CheckResult check_robin(const AcceptanceConfig& cfg) {
  return detail::timed("Robin images oracle", "robin3d", 600.0, [&](CheckResult& r) {
    const AxiGrid g = make_axi_grid(cfg.axi_cells);
    const std::vector<double> poles{0.1, 0.3, 0.5, 0.6, 0.7};
    const auto res = robin_mass_profile(0.0, 0.0, poles, g, true);
    double worst_c = 0.0, worst_x = 0.0;
    for (const auto& x : res) {
      const double exact = -1.0 / (1.0 - x.pole_radius * x.pole_radius);
      worst_c = std::max(worst_c, detail::rel(x.coarse, exact));
      worst_x = std::max(worst_x, detail::rel(x.robin_mass, exact));
    }
    const auto th = lambda_star_merely_singular_3d(0.0, g);
    const double ls_err = detail::rel(th.lambda_star, 0.25 * std::numbers::pi * std::numbers::pi);
    bool ladder = true;
    double prev = -INFINITY;
    for (int k = 0; k < 10; ++k) {
      const double v = robin_sup(-0.5, 10.0 * k / 10.0, g).value;  // λ₁ ≈ 10.9 at γ = -1/2
      ladder = ladder && v > prev;
      prev = v;
    }
    r.metrics["images_max_rel_default"] = worst_c;
    r.metrics["images_max_rel_extrapolated"] = worst_x;
    r.metrics["lambda_star_gamma0"] = th.lambda_star;
    r.metrics["lambda_star_rel"] = ls_err;
    r.metrics["sup_increasing"] = ladder;
    r.passed = worst_c < 0.02 && worst_x < 0.005 && ls_err < 0.02 && ladder;
  });
}

inline CheckResult check_green_bounds(const AcceptanceConfig& cfg) {
  return detail::timed("Green bounds", "robin3d", 300.0, [&](CheckResult& r) {
    const AxiGrid g = make_axi_grid(cfg.axi_cells);
    struct Case { double gamma, lam, pole; };
    const std::vector<Case> cases{{0.0, 0.0, 0.5}, {0.0, 4.0, 0.3}, {-0.5, 0.0, 0.4},
                                  {-0.5, 5.0, 0.6}, {-1.0, 0.0, 0.5}, {-1.0, 6.0, 0.3}};
    bool ok = true;
    int k = 0;
    for (const auto& c : cases) {
      const auto rep = green_bound_check(c.gamma, c.lam, c.pole, g, 200, cfg.seed + k);
      const bool pass = rep.positive && std::isfinite(rep.max_ratio) && rep.min_interior_ratio > 0.0 &&
                        std::isfinite(rep.min_interior_ratio);
      r.metrics["max_ratio_" + std::to_string(k)] = rep.max_ratio;
      r.metrics["min_ratio_" + std::to_string(k)] = rep.min_interior_ratio;
      ok = ok && pass;
      ++k;
    }
    r.passed = ok;
  });
}

inline CheckResult check_subsupersolutions(const AcceptanceConfig& cfg) {
  (void)cfg;
  return detail::timed("local sub/supersolutions", "mass_threshold", 30.0, [&](CheckResult& r) {
    struct Case { int n; double gamma, theta; BetaChoice beta; };
    const std::vector<Case> cases{{3, 0.0, 0.5, BetaChoice::Minus},  {3, 0.0, 0.5, BetaChoice::Plus},
                                  {3, -0.5, 0.3, BetaChoice::Minus}, {3, -0.5, 0.3, BetaChoice::Plus},
                                  {4, 0.5, 0.7, BetaChoice::Minus},  {4, 0.5, 0.7, BetaChoice::Plus},
                                  {5, -2.0, 0.9, BetaChoice::Minus}, {5, 2.0, 0.2, BetaChoice::Plus}};
    int verified = 0;
    for (const auto& c : cases) {
      const ProblemParams p{c.n, c.gamma, 0.0, 0.0, 1.0};
      bool both = true;
      for (auto sign : {SolutionSign::Sub, SolutionSign::Super})
        both = both && subsupersolution_check(p, c.theta, c.beta, sign).verified;
      verified += both;
    }
    double worst = 0.0;
    for (const auto& [n, gamma, cm, cp] : std::vector<std::tuple<int, double, double, double>>{
             {3, 0.0, 1.0, 1.0}, {3, -0.5, 1.0, 2.0}, {4, 0.75 - 1e-3, 2.0, 0.5}, {5, -1.0, 0.0, 1.0}}) {
      const auto f = euler_combination_fit(ProblemParams{n, gamma, 0.0, 0.0, 1.0}, cm, cp);
      worst = std::max(worst, f.residual);
    }
    r.metrics["verified_cases"] = verified;
    r.metrics["euler_fit_residual"] = worst;
    r.passed = verified == static_cast<int>(cases.size()) && worst < 1e-10;
  });
}

/// Runs every check whose module is selected, in a fixed order.
inline std::vector<CheckResult> run_acceptance(const AcceptanceConfig& cfg) {
  auto on = [&](const std::string& m) { return cfg.modules.empty() || cfg.modules.count(m) > 0; };
  std::vector<CheckResult> out;
  if (on("params")) out.push_back(check_exponent_identities(cfg));
  if (on("mass_threshold")) {
    out.push_back(check_euler_mass(cfg));
    out.push_back(check_bessel_agreement(cfg));
    out.push_back(check_threshold_triple(cfg));
  }
  if (on("spectral")) out.push_back(check_lambda1_oracle(cfg));
  if (on("mass_threshold")) out.push_back(check_mass_properties(cfg));
  if (on("extremals")) {
    out.push_back(check_high_dim_threshold_zero(cfg));
    out.push_back(check_sign_law(cfg));
  }
  if (on("spectral") || on("mass_threshold")) {
    const auto t0 = std::chrono::steady_clock::now();
    GroundStateLadder L;
    std::string err;
    try {
      L = ground_state_ladder(cfg);
    } catch (const std::exception& e) {
      err = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (err.empty()) {
      // the ladder is ground-state work; Pohozaev only evaluates it
      auto charge = [&](CheckResult c) {
        c.runtime += secs;
        if (c.runtime > c.budget && c.passed) c.passed = false, c.note = "over time budget";
        out.push_back(std::move(c));
      };
      if (on("spectral")) charge(check_ground_state_threshold(L));
      if (on("mass_threshold")) out.push_back(check_pohozaev(L));
    } else {
      for (const char* name : {"ground-state threshold behavior", "Pohozaev"}) {
        CheckResult r;
        r.name = name;
        r.module = "spectral";
        r.note = "error: " + err;
        r.runtime = secs;
        out.push_back(r);
      }
    }
  }
  if (on("robin3d")) {
    out.push_back(check_robin(cfg));
    out.push_back(check_green_bounds(cfg));
  }
  if (on("mass_threshold")) out.push_back(check_subsupersolutions(cfg));
  return out;
}

}  // namespace hardy
