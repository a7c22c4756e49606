#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hardy/errors.hpp"
#include "hardy/expansion.hpp"
#include "hardy/extremals.hpp"
#include "hardy/mass.hpp"
#include "hardy/params.hpp"
#include "hardy/radial.hpp"
#include "hardy/spectral.hpp"

// Merely singular case in three dimensions. All solves live on the unit ball;
// other radii are handled by the scaling λ ↦ λρ².

namespace hardy {

/// Meridian half-disk {(ρ_c, z): ρ_c ≥ 0, ρ_c² + z² ≤ 1} with spacing h = 1/N.
/// Node (i, j) sits at ρ_c = i·h, z = -1 + j·h.
struct AxiGrid {
  int N = 256;
  double h = 1.0 / 256;
  std::vector<int> id;                ///< (i, j) -> unknown index, -1 outside or on the sphere
  std::vector<std::array<int, 2>> ij;  ///< unknown -> (i, j)
  /// distances to the right, up, down neighbour or to the sphere when it comes first
  std::vector<double> right, up, down;
  /// the neighbours themselves, -1 where the sphere cuts in
  std::vector<int> right_node, up_node, down_node;
  std::vector<bool> on_axis;

  int index(int i, int j) const { return id[static_cast<std::size_t>(j) * (N + 1) + i]; }
  double rho(int k) const { return ij[k][0] * h; }
  double z(int k) const { return -1.0 + ij[k][1] * h; }
  std::size_t size() const { return ij.size(); }
};

inline AxiGrid make_axi_grid(int N = 256) {
  if (N < 8) fail(ErrorKind::InvalidGrid, "meridian grid needs N >= 8");
  AxiGrid g;
  g.N = N;
  g.h = 1.0 / N;
  const double h = g.h;
  g.id.assign(static_cast<std::size_t>(2 * N + 1) * (N + 1), -1);
  for (int j = 0; j <= 2 * N; ++j) {
    for (int i = 0; i <= N; ++i) {
      const double r = i * h, z = -1.0 + j * h;
      if (1.0 - std::hypot(r, z) > 1e-10) {
        g.id[static_cast<std::size_t>(j) * (N + 1) + i] = static_cast<int>(g.ij.size());
        g.ij.push_back({i, j});
      }
    }
  }
  for (std::size_t k = 0; k < g.ij.size(); ++k) {
    const auto [i, j] = g.ij[k];
    const double r = i * h, z = -1.0 + j * h;
    const double zs = std::sqrt(std::max(0.0, 1.0 - r * r)), rs = std::sqrt(std::max(0.0, 1.0 - z * z));
    g.right_node.push_back(i < N ? g.index(i + 1, j) : -1);
    g.up_node.push_back(j < 2 * N ? g.index(i, j + 1) : -1);
    g.down_node.push_back(j > 0 ? g.index(i, j - 1) : -1);
    g.right.push_back(g.right_node.back() >= 0 ? h : rs - r);
    g.up.push_back(g.up_node.back() >= 0 ? h : zs - z);
    g.down.push_back(g.down_node.back() >= 0 ? h : z + zs);
    g.on_axis.push_back(i == 0);
  }
  return g;
}

/// Bisects the spacing.
inline AxiGrid refine(const AxiGrid& g) { return make_axi_grid(2 * g.N); }

struct RobinResult {
  double pole_radius = 0.0;
  double robin_mass = 0.0;  ///< R with G = (1/4π)(1/|x-x₀| + R) + o(1)
  std::pair<double, double> grid_spacings{0.0, 0.0};
  bool extrapolated = false;
  double coarse = 0.0, fine = 0.0;
};

namespace detail {

inline double potential3(double gamma, double lam, double r2) { return gamma == 0.0 ? lam : gamma / r2 + lam; }

/// Factored discretization of -Δ - (γ/|x|² + λ) on the meridian grid. Solutions
/// are the regular part w₂ in G = Φ - c|x-x₀| + w₂ with Φ = 1/(4π|x-x₀|) and
/// c = V(x₀)/(8π), which leaves a bounded source.
class AxiSolver {
 public:
  AxiSolver(const AxiGrid& grid, double gamma, double lam) : g_(grid), gamma_(gamma), lam_(lam) {
    const double h = g_.h;
    const std::size_t M = g_.size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * M);
    for (std::size_t k = 0; k < M; ++k) {
      const auto [i, j] = g_.ij[k];
      const double r = g_.rho(static_cast<int>(k)), z = g_.z(static_cast<int>(k));
      const int row = static_cast<int>(k);
      if (origin_pinned(k)) {
        t.emplace_back(row, row, 1.0);
        continue;
      }
      const double hu = g_.up[k], hd = g_.down[k], hr = g_.right[k];
      double diag = 2.0 / (hu * hd) - potential3(gamma_, lam_, r * r + z * z);
      auto add = [&](int c, double coef) {
        if (c >= 0) t.emplace_back(row, c, coef);
      };
      // z direction, nonuniform three-point
      const double cu = -2.0 / (hu * (hu + hd)), cd = -2.0 / (hd * (hu + hd));
      add(g_.up_node[k], cu);
      add(g_.down_node[k], cd);
      if (i == 0) {
        // axis: Δ = 2 ∂²_ρ + ∂²_z with the even reflection
        diag += 4.0 / (hr * hr);
        add(g_.right_node[k], -4.0 / (hr * hr));
      } else {
        const double hl = h;
        const double cr2 = 2.0 / (hr * (hl + hr)), cl2 = 2.0 / (hl * (hl + hr));
        const double cr1 = hl / (hr * (hl + hr)), cl1 = -hr / (hl * (hl + hr)), c01 = (hr - hl) / (hl * hr);
        diag += 2.0 / (hl * hr) - c01 / r;
        add(g_.right_node[k], -(cr2 + cr1 / r));
        add(g_.index(i - 1, j), -(cl2 + cl1 / r));
      }
      t.emplace_back(row, row, diag);
    }
    A_.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    A_.setFromTriplets(t.begin(), t.end());
    A_.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success) fail(ErrorKind::NotCoercive, "singular meridian discretization: " + lu_->lastErrorMessage());
  }

  /// w₂ at every unknown for a pole on the axis at height z0.
  std::vector<double> solve(double z0) const {
    const double h = g_.h;
    const double V0 = potential3(gamma_, lam_, z0 * z0);
    const double c = V0 / (8.0 * std::numbers::pi);
    auto psi = [&](double r, double z) { return std::hypot(r, z - z0); };
    auto bdry = [&](double r, double z) {
      const double d = psi(r, z);
      return -1.0 / (4.0 * std::numbers::pi * d) + c * d;
    };
    const std::size_t M = g_.size();
    Eigen::VectorXd b(static_cast<Eigen::Index>(M));
    for (std::size_t k = 0; k < M; ++k) {
      const auto [i, j] = g_.ij[k];
      const double r = g_.rho(static_cast<int>(k)), z = g_.z(static_cast<int>(k));
      if (origin_pinned(k)) {
        b[k] = bdry(0.0, 0.0);  // G(0) = 0 when γ < 0
        continue;
      }
      const double d = psi(r, z), V = potential3(gamma_, lam_, r * r + z * z);
      double s = d > 0.0 ? (V - V0) / (4.0 * std::numbers::pi * d) : 0.0;
      s -= c * V * d;
      const double hu = g_.up[k], hd = g_.down[k], hr = g_.right[k];
      if (g_.up_node[k] < 0) s += 2.0 / (hu * (hu + hd)) * bdry(r, z + hu);
      if (g_.down_node[k] < 0) s += 2.0 / (hd * (hu + hd)) * bdry(r, z - hd);
      if (g_.right_node[k] < 0) {
        if (i == 0) {
          s += 4.0 / (hr * hr) * bdry(hr, z);
        } else {
          const double hl = h;
          s += (2.0 / (hr * (hl + hr)) + hl / (hr * (hl + hr)) / r) * bdry(r + hr, z);
        }
      }
      b[k] = s;
    }
    const Eigen::VectorXd x = lu_->solve(b);
    return {x.data(), x.data() + x.size()};
  }

  /// 4π w₂(x₀) by cubic interpolation along the axis.
  double robin_mass(double z0) const { return robin_mass(solve(z0), z0); }

  double robin_mass(const std::vector<double>& w, double z0) const {
    const double h = g_.h;
    const int j = static_cast<int>(std::floor((z0 + 1.0) / h));
    double acc = 0.0;
    for (int a = j - 1; a <= j + 2; ++a) {
      double l = 1.0;
      for (int b = j - 1; b <= j + 2; ++b)
        if (b != a) l *= (z0 - (-1.0 + b * h)) / ((a - b) * h);
      const int k = g_.index(0, a);
      if (k < 0) fail(ErrorKind::InvalidParams, "pole too close to the sphere");
      acc += l * w[k];
    }
    return 4.0 * std::numbers::pi * acc;
  }

  /// G(x) at a meridian point by bilinear interpolation of w₂.
  double green(const std::vector<double>& w, double z0, double r, double z) const {
    const double h = g_.h;
    const int i = std::min(static_cast<int>(std::floor(r / h)), g_.N - 1);
    const int j = std::min(static_cast<int>(std::floor((z + 1.0) / h)), 2 * g_.N - 1);
    const double a = r / h - i, b = (z + 1.0) / h - j;
    double acc = 0.0;
    for (int di = 0; di <= 1; ++di)
      for (int dj = 0; dj <= 1; ++dj) {
        const int k = g_.index(i + di, j + dj);
        if (k < 0) fail(ErrorKind::InvalidParams, "sample point too close to the sphere");
        acc += (di ? a : 1.0 - a) * (dj ? b : 1.0 - b) * w[k];
      }
    const double d = std::hypot(r, z - z0);
    const double c = potential3(gamma_, lam_, z0 * z0) / (8.0 * std::numbers::pi);
    return 1.0 / (4.0 * std::numbers::pi * d) - c * d + acc;
  }

  const AxiGrid& grid() const { return g_; }

 private:
  bool origin_pinned(std::size_t k) const { return gamma_ < 0.0 && g_.ij[k][0] == 0 && g_.ij[k][1] == g_.N; }

  const AxiGrid& g_;
  double gamma_, lam_;
  Eigen::SparseMatrix<double> A_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

inline void require_robin_params(double gamma, double lam) {
  if (!(gamma <= 0.0)) fail(ErrorKind::InvalidParams, "robin3d needs gamma <= 0");
  if (!std::isfinite(lam)) fail(ErrorKind::InvalidParams, "lambda must be finite");
  const double l1 = lambda1(ProblemParams{3, gamma, 0.0, 0.0, 1.0}).value;
  if (!(lam < l1)) fail(ErrorKind::NotCoercive, "lambda is at or above the first eigenvalue");
}

inline void require_pole(double gamma, double pole_radius, const AxiGrid& g) {
  if (!(pole_radius >= 0.0 && pole_radius < 1.0 - 5.0 * g.h))
    fail(ErrorKind::InvalidParams, "pole radius must lie in [0, 1 - 5h)");
  if (gamma < 0.0 && pole_radius < 5.0 * g.h)
    fail(ErrorKind::PoleTooCloseToOrigin, "pole within five grid spacings of the singular point");
}

/// Centred pole with γ = 0: v = r·w solves -v'' - λv = λ/(4π) on (0, 1) with
/// v(0) = 0, v(1) = -1/(4π); R = 4π v'(0). Second-order differences on N cells.
inline double radial_robin_mass(double lam, int N) {
  const double h = 1.0 / N;
  SymTridiag T;
  T.diag.assign(N - 1, 2.0 / (h * h) - lam);
  T.off.assign(N - 2, -1.0 / (h * h));
  std::vector<double> b(N - 1, lam / (4.0 * std::numbers::pi));
  b.back() += -1.0 / (4.0 * std::numbers::pi) / (h * h);
  const auto v = solve(T, b);
  // v'(0) from the one-sided second-order stencil and the equation v''(0) = -λ/(4π)
  const double dv = (v[0] - 0.0) / h + 0.5 * h * lam / (4.0 * std::numbers::pi);
  return 4.0 * std::numbers::pi * dv;
}

}  // namespace detail

/// Robin mass at a pole on the axis at distance pole_radius from the centre,
/// Richardson-extrapolated over `grid` and its refinement.
inline RobinResult robin_mass_at(double gamma, double lam, double pole_radius, const AxiGrid& grid,
                                 bool extrapolate = true);

/// robin_mass_at for several poles, one factorization per grid.
inline std::vector<RobinResult> robin_mass_profile(double gamma, double lam, const std::vector<double>& pole_radii,
                                                   const AxiGrid& grid, bool extrapolate = true) {
  detail::require_robin_params(gamma, lam);
  for (double x : pole_radii) detail::require_pole(gamma, x, grid);
  std::vector<RobinResult> out(pole_radii.size());
  auto sweep = [&](const AxiGrid& g, bool fine) {
    std::unique_ptr<detail::AxiSolver> S;
    for (std::size_t k = 0; k < pole_radii.size(); ++k) {
      double v;
      if (pole_radii[k] == 0.0 && gamma == 0.0) {
        v = detail::radial_robin_mass(lam, 4 * g.N);
      } else {
        if (!S) S = std::make_unique<detail::AxiSolver>(g, gamma, lam);
        v = S->robin_mass(pole_radii[k]);
      }
      (fine ? out[k].fine : out[k].coarse) = v;
    }
  };
  sweep(grid, false);
  if (extrapolate) sweep(refine(grid), true);
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& r = out[k];
    r.pole_radius = pole_radii[k];
    r.extrapolated = extrapolate;
    r.grid_spacings = {grid.h, extrapolate ? 0.5 * grid.h : grid.h};
    if (!extrapolate) r.fine = r.coarse;
    r.robin_mass = extrapolate ? (4.0 * r.fine - r.coarse) / 3.0 : r.coarse;
  }
  return out;
}

inline RobinResult robin_mass_at(double gamma, double lam, double pole_radius, const AxiGrid& grid, bool extrapolate) {
  return robin_mass_profile(gamma, lam, {pole_radius}, grid, extrapolate).front();
}

struct RobinSup {
  double value = 0.0;
  double argmax = 0.0;
};

/// sup over poles of R_{γ,λ}(B, x₀); by rotational symmetry a search over the
/// pole radius. One factorization, golden-section search on the radius. For
/// γ = 0 the centre is included through the radial path.
inline RobinSup robin_sup(double gamma, double lam, const AxiGrid& grid) {
  detail::require_robin_params(gamma, lam);
  const detail::AxiSolver S(grid, gamma, lam);
  const double lo = gamma < 0.0 ? 5.0 * grid.h * 1.0001 : 0.0;
  const double hi = 1.0 - 6.0 * grid.h;
  auto f = [&](double x) {
    if (x == 0.0) return detail::radial_robin_mass(lam, 4 * grid.N);
    return S.robin_mass(x);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a), fc = f(c), fd = f(d);
  while (b - a > 1e-3) {
    if (fc > fd) {
      b = d; d = c; fd = fc; c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + gr * (b - a); fd = f(d);
    }
  }
  RobinSup best{fc > fd ? fc : fd, fc > fd ? c : d};
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.value) best = {v, x};
  }
  return best;
}

/// λ* = sup{λ : sup_x₀ R_{γ,λ}(B, x₀) ≤ 0} on the ball of radius p.ball_radius,
/// by bisection on (0, λ₁) of the unit-ball problem and rescaling.
inline ThresholdReport lambda_star_merely_singular_3d(double gamma, const AxiGrid& grid, double ball_radius = 1.0,
                                                     double rel_tol = 1e-4) {
  if (!(gamma <= 0.0)) fail(ErrorKind::RegimeMismatch, "merely singular case needs gamma <= 0");
  if (!(ball_radius > 0.0)) fail(ErrorKind::InvalidParams, "ball radius must be positive");
  const double l1 = lambda1(ProblemParams{3, gamma, 0.0, 0.0, 1.0}).value;
  double a = 1e-6 * l1, b = 0.999 * l1;
  const double fa = robin_sup(gamma, a, grid).value, fb = robin_sup(gamma, b, grid).value;
  if (!(fa <= 0.0 && fb > 0.0)) fail(ErrorKind::NoSignChange, "robin supremum does not change sign on (0, lambda1)");
  while (b - a > rel_tol * l1) {
    const double m = 0.5 * (a + b);
    (robin_sup(gamma, m, grid).value <= 0.0 ? a : b) = m;
  }
  const double s2 = ball_radius * ball_radius;
  ThresholdReport rep;
  rep.method = ThresholdMethod::ClosedFormMerely;
  rep.lambda_star = 0.5 * (a + b) / s2;
  rep.bracket = {a / s2, b / s2};
  rep.lambda1 = l1 / s2;
  rep.conditional = false;
  if (gamma == 0.0) {
    const double exact = 0.25 * std::numbers::pi * std::numbers::pi / s2;
    rep.cross_residuals["ClosedFormMerely"] = std::abs(rep.lambda_star - exact) / exact;
  }
  return rep;
}

/// J on the ball of u = η·U_ε(· - x₀), U(x) = (1 + |x|²)^{-1/2}, with the pole on
/// the axis. u is radial about x₀, so the energy reduces to a quadrature in the
/// distance t to x₀ with γ/|x|² replaced by its average over the sphere of radius
/// t about x₀. η(t) = cos(πt/(2R_c)) for t < R_c = min(|x₀|, 1 - |x₀|).
inline EnergyBreakdown energy_of_offcenter_bubble(const ProblemParams& p, double x0_radius, double eps,
                                                  const AxiGrid& grid) {
  if (!(p.n == 3 && p.s == 0.0 && p.gamma <= 0.0))
    fail(ErrorKind::RegimeMismatch, "off-centre bubbles are for n = 3, s = 0, gamma <= 0");
  if (!(x0_radius >= 0.0 && x0_radius < 1.0)) fail(ErrorKind::InvalidParams, "pole radius must lie in [0, 1)");
  if (p.gamma < 0.0 && x0_radius == 0.0) fail(ErrorKind::PoleTooCloseToOrigin, "pole at the singular point");
  if (eps < 5.0 * grid.h) fail(ErrorKind::BubbleUnresolved, "eps below five grid spacings");
  const double d = x0_radius * p.ball_radius;
  const double Rc = x0_radius == 0.0 ? p.ball_radius : std::min(d, p.ball_radius - d);
  if (!(eps < Rc)) fail(ErrorKind::InvalidParams, "eps must be below the cutoff radius");
  const double pi = std::numbers::pi;
  // sphere average of 1/|x|² over |x - x₀| = t
  auto inv_r2 = [&](double t) {
    if (d == 0.0) return 1.0 / (t * t);
    return std::log((d + t) / std::abs(d - t)) / (2.0 * d * t);
  };
  // t in [0, Rc]: panels graded towards the bubble scale
  QuadratureRule q = composite_gauss(0.0, std::min(eps, Rc), 8);
  for (double lo = eps; lo < Rc; lo *= 1.5) {
    const auto seg = composite_gauss(lo, std::min(1.5 * lo, Rc), 2);
    q.x.insert(q.x.end(), seg.x.begin(), seg.x.end());
    q.w.insert(q.w.end(), seg.w.begin(), seg.w.end());
  }
  EnergyBreakdown out;
  for (std::size_t k = 0; k < q.x.size(); ++k) {
    const double t = q.x[k], w = q.w[k] * 4.0 * pi * t * t;
    const double x = t / eps;
    const double U = std::pow(eps, -0.5) / std::sqrt(1.0 + x * x);
    const double dU = -std::pow(eps, -1.5) * x / std::pow(1.0 + x * x, 1.5);
    const double eta = std::cos(0.5 * pi * t / Rc), deta = -0.5 * pi / Rc * std::sin(0.5 * pi * t / Rc);
    const double u = eta * U, du = deta * U + eta * dU;
    out.gradient += w * du * du;
    out.hardy_linear += w * (p.gamma * inv_r2(t) + p.lam) * u * u;
    out.constraint += w * std::pow(u, 6.0);
  }
  out.value = (out.gradient - out.hardy_linear) / std::cbrt(out.constraint);
  return out;
}

/// Fit J(u_ε) - μ_RN ≈ slope·ε + next·ε² over a ladder of bubble scales.
struct OffcenterFit {
  double slope = 0.0;
  double next = 0.0;
  double slope_error = 0.0;  ///< change in slope when the coarsest point is dropped
  std::vector<double> eps, energy;
};

inline OffcenterFit fit_offcenter_expansion(const ProblemParams& p, double x0_radius, const std::vector<double>& ladder,
                                            const AxiGrid& grid) {
  if (ladder.size() < 3) fail(ErrorKind::InvalidParams, "need at least three bubble scales");
  OffcenterFit f;
  f.eps = ladder;
  const double mu = compute_mu_rn(p);
  for (double e : ladder) f.energy.push_back(energy_of_offcenter_bubble(p, x0_radius, e, grid).value - mu);
  auto fit = [&](std::size_t from) {
    const auto K = static_cast<Eigen::Index>(ladder.size() - from);
    Eigen::MatrixXd X(K, 2);
    Eigen::VectorXd y(K);
    for (Eigen::Index k = 0; k < K; ++k) {
      const double e = ladder[from + k];
      X(k, 0) = e;
      X(k, 1) = e * e;
      y(k) = f.energy[from + k];
    }
    return Eigen::Vector2d(X.colPivHouseholderQr().solve(y));
  };
  const Eigen::Vector2d c = fit(0);
  f.slope = c(0);
  f.next = c(1);
  f.slope_error = std::abs(fit(1)(0) - c(0));
  return f;
}

/// Sampled check of the pointwise Green bound shape
/// G_p(x) ≍ (max{|p|,|x|}/min{|p|,|x|})^{β₋} |x - p|^{-1}.
struct GreenBoundReport {
  double max_ratio = 0.0;
  double min_interior_ratio = 0.0;  ///< over |x| ≤ 0.8
  double ratio_near_pole = 0.0;     ///< at distance 4h from p, off the axis
  bool positive = true;
  int samples = 0;
};

inline GreenBoundReport green_bound_check(double gamma, double lam, double pole_radius, const AxiGrid& grid,
                                          int samples = 200, std::uint64_t seed = 12345) {
  detail::require_robin_params(gamma, lam);
  detail::require_pole(gamma, pole_radius, grid);
  if (pole_radius == 0.0) fail(ErrorKind::InvalidParams, "bound check needs an off-centre pole");
  const detail::AxiSolver S(grid, gamma, lam);
  const auto w = S.solve(pole_radius);
  const double bm = compute_exponents(ProblemParams{3, gamma, 0.0, 0.0, 1.0}).beta_minus;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GreenBoundReport rep;
  rep.min_interior_ratio = INFINITY;
  const double excl = 3.0 * grid.h, p = pole_radius;
  while (rep.samples < samples) {
    const double r = U(rng), z = 2.0 * U(rng) - 1.0;
    const double ax = std::hypot(r, z), dp = std::hypot(r, z - p);
    if (ax > 1.0 - 2.0 * grid.h || ax < excl || dp < excl) continue;
    ++rep.samples;
    const double G = S.green(w, p, r, z);
    if (!(G > 0.0)) rep.positive = false;
    const double shape = std::pow(std::max(p, ax) / std::min(p, ax), bm) / dp;
    const double ratio = G / shape;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ax <= 0.8) rep.min_interior_ratio = std::min(rep.min_interior_ratio, ratio);
  }
  {
    const double r = 4.0 * grid.h, ax = std::hypot(r, p);
    rep.ratio_near_pole = S.green(w, p, r, p) * r / std::pow(std::max(p, ax) / std::min(p, ax), bm);
  }
  return rep;
}

}  // namespace hardy
