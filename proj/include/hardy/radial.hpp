#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

enum class Grading { Geometric, Uniform };

/// Nodes r0 = r_0 < r_1 < ... < r_{N-1} = radius. The segment [0, r0] is never
/// meshed; callers handle it with a power-law model of the profile.
struct RadialGrid {
  double radius = 1.0;
  std::vector<double> nodes;
  Grading grading = Grading::Geometric;

  double r0() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
};

inline RadialGrid make_grid(double radius, int count, Grading grading, double r0) {
  if (!(radius > 0.0)) fail(ErrorKind::InvalidGrid, "radius must be positive");
  if (!(r0 > 0.0) || !(r0 < radius)) fail(ErrorKind::InvalidGrid, "require 0 < r0 < radius");
  if (count < 2) fail(ErrorKind::InvalidGrid, "need at least two nodes");
  RadialGrid g;
  g.radius = radius;
  g.grading = grading;
  g.nodes.resize(static_cast<std::size_t>(count));
  const int last = count - 1;
  if (grading == Grading::Geometric) {
    const double log_ratio = std::log(radius / r0) / last;
    for (int i = 0; i < count; ++i) g.nodes[i] = r0 * std::exp(log_ratio * i);
  } else {
    const double h = (radius - r0) / last;
    for (int i = 0; i < count; ++i) g.nodes[i] = r0 + h * i;
  }
  g.nodes.front() = r0;
  g.nodes.back() = radius;
  return g;
}

/// Geometric grid with inner cut r0 = rel_r0 * radius.
inline RadialGrid default_grid(double radius, int count = 2001, double rel_r0 = 1e-6) {
  return make_grid(radius, count, Grading::Geometric, rel_r0 * radius);
}

/// Bisects every interval (geometric mean for geometric grids).
inline RadialGrid refine(const RadialGrid& g) {
  RadialGrid f;
  f.radius = g.radius;
  f.grading = g.grading;
  f.nodes.reserve(2 * g.size() - 1);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double a = g.nodes[i], b = g.nodes[i + 1];
    f.nodes.push_back(a);
    f.nodes.push_back(g.grading == Grading::Geometric ? std::sqrt(a * b) : 0.5 * (a + b));
  }
  f.nodes.push_back(g.nodes.back());
  return f;
}

/// Profile sampled on a grid. `derivs` is optional (empty when unknown).
struct RadialFunction {
  RadialGrid grid;
  std::vector<double> values;
  std::vector<double> derivs;
  double boundary_value = 0.0;

  bool has_derivs() const { return derivs.size() == values.size(); }
};

/// Radial potential h(r) = Σ_k c_k r^k.
struct RadialPotential {
  std::vector<double> coeffs;

  static RadialPotential constant(double value) { return RadialPotential{{value}}; }
  static RadialPotential zero() { return RadialPotential{}; }

  double operator()(double r) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
    return acc;
  }
  double at_origin() const { return coeffs.empty() ? 0.0 : coeffs.front(); }
  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
  }
  RadialPotential shifted(double delta) const {
    RadialPotential q = *this;
    if (q.coeffs.empty()) q.coeffs.push_back(0.0);
    q.coeffs.front() += delta;
    return q;
  }
};

/// |S^{n-1}| = 2π^{n/2}/Γ(n/2), the area of the unit sphere in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// 10-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre10 {
  static constexpr std::array<double, 10> x = {
      -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
      -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
      0.8650633666889845,  0.9739065285171717};
  static constexpr std::array<double, 10> w = {
      0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
      0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
      0.1494513491505806, 0.0666713443086881};
};

/// Composite Gauss-Legendre nodes/weights on [a, b] split into `panels` equal panels.
struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline QuadratureRule composite_gauss(double a, double b, int panels) {
  QuadratureRule q;
  q.x.reserve(10 * panels);
  q.w.reserve(10 * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < 10; ++k) {
      q.x.push_back(mid + 0.5 * h * GaussLegendre10::x[k]);
      q.w.push_back(0.5 * h * GaussLegendre10::w[k]);
    }
  }
  return q;
}

/// Gauss-Legendre rule on [a, b], 0 < a < b, split geometrically so that each
/// panel has endpoint ratio at most `max_ratio`. Power weights r^k stay well
/// integrated on elements that touch the inner cut.
inline QuadratureRule graded_gauss(double a, double b, double max_ratio = 1.5) {
  QuadratureRule q;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(max_ratio))));
  const double step = std::pow(b / a, 1.0 / panels);
  double lo = a;
  for (int p = 0; p < panels; ++p) {
    const double hi = p + 1 == panels ? b : lo * step;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < 10; ++k) {
      q.x.push_back(mid + half * GaussLegendre10::x[k]);
      q.w.push_back(half * GaussLegendre10::w[k]);
    }
    lo = hi;
  }
  return q;
}

/// ω_{n-1} ∫_0^ρ f(r) r^{n-1+weight_exponent} dr.
///
/// Composite quadratic rule on the grid nodes (pairs of intervals, last odd
/// interval closed with the quadratic through the last three nodes). The segment
/// [0, r0] is integrated analytically assuming f(r) = f(r0)(r/r0)^leading_power.
inline double quadrature(const RadialFunction& f, int n, double weight_exponent, double leading_power = 0.0) {
  const auto& r = f.grid.nodes;
  const std::size_t N = r.size();
  if (f.values.size() != N) fail(ErrorKind::InvalidGrid, "values/grid size mismatch");
  const double k = n - 1 + weight_exponent;
  const double inner_exp = leading_power + k + 1.0;
  if (!(inner_exp > 0.0)) fail(ErrorKind::NonIntegrable, "combined exponent at the origin is <= -1");

  std::vector<double> g(N);
  for (std::size_t i = 0; i < N; ++i) g[i] = f.values[i] * std::pow(r[i], k);

  // ∫ over [x0, x2] of the quadratic through (x0,y0),(x1,y1),(x2,y2).
  auto simpson3 = [](double x0, double x1, double x2, double y0, double y1, double y2) {
    const double h0 = x1 - x0, h1 = x2 - x1, H = h0 + h1;
    return H / 6.0 * ((2.0 - h1 / h0) * y0 + H * H / (h0 * h1) * y1 + (2.0 - h0 / h1) * y2);
  };
  // ∫ over [x1, x2] of the same quadratic.
  auto last_interval = [](double x0, double x1, double x2, double y0, double y1, double y2) {
    const double h0 = x1 - x0, h1 = x2 - x1;
    const double c0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    const double c1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
    const double c2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
    return c0 * y0 + c1 * y1 + c2 * y2;
  };

  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 2 < N; i += 2) acc += simpson3(r[i], r[i + 1], r[i + 2], g[i], g[i + 1], g[i + 2]);
  if (i + 1 < N) {
    if (N >= 3)
      acc += last_interval(r[N - 3], r[N - 2], r[N - 1], g[N - 3], g[N - 2], g[N - 1]);
    else
      acc += 0.5 * (r[1] - r[0]) * (g[0] + g[1]);
  }
  acc += f.values.front() * std::pow(r.front(), k + 1.0) / inner_exp;
  return sphere_area(n) * acc;
}

}  // namespace hardy
