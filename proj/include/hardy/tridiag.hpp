#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

/// Symmetric tridiagonal matrix: diag[i] = T(i,i), off[i] = T(i,i+1).
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t N = size();
    for (std::size_t i = 0; i < N; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += off[i - 1] * x[i - 1];
      if (i + 1 < N) v += off[i] * x[i + 1];
      y[i] = v;
    }
  }
  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(size());
    multiply(x, y);
    return y;
  }
  double quadratic_form(std::span<const double> x) const {
    double acc = 0.0;
    const std::size_t N = size();
    for (std::size_t i = 0; i < N; ++i) {
      acc += diag[i] * x[i] * x[i];
      if (i + 1 < N) acc += 2.0 * off[i] * x[i] * x[i + 1];
    }
    return acc;
  }
  /// this - sigma * other
  SymTridiag shifted(const SymTridiag& other, double sigma) const {
    SymTridiag t = *this;
    for (std::size_t i = 0; i < t.diag.size(); ++i) t.diag[i] -= sigma * other.diag[i];
    for (std::size_t i = 0; i < t.off.size(); ++i) t.off[i] -= sigma * other.off[i];
    return t;
  }
};

/// Number of negative pivots in the LDLᵀ factorization of T (Sylvester inertia).
inline std::size_t negative_count(const SymTridiag& T) {
  std::size_t count = 0;
  double d = T.diag[0];
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0;; ++i) {
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
    if (i + 1 == T.size()) break;
    d = T.diag[i + 1] - T.off[i] * T.off[i] / d;
  }
  return count;
}

/// Solves T x = b by the Thomas algorithm (no pivoting).
inline std::vector<double> solve(const SymTridiag& T, std::span<const double> b) {
  const std::size_t N = T.size();
  std::vector<double> c(N), x(b.begin(), b.end());
  double d = T.diag[0];
  x[0] /= d;
  for (std::size_t i = 1; i < N; ++i) {
    c[i - 1] = T.off[i - 1] / d;
    d = T.diag[i] - T.off[i - 1] * c[i - 1];
    x[i] = (x[i] - T.off[i - 1] * x[i - 1]) / d;
  }
  for (std::size_t i = N - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

struct PencilEigenpair {
  double value = 0.0;
  std::vector<double> vector;  ///< M-normalized, positive first entry
  double residual = 0.0;       ///< ‖(A - λM)x‖ / ‖Ax‖
};

/// Smallest eigenvalue of A x = λ M x (M symmetric positive definite) by bisection
/// on the inertia of A - σM, refined by inverse iteration.
inline PencilEigenpair smallest_eigenpair(const SymTridiag& A, const SymTridiag& M) {
  auto below = [&](double sigma) { return negative_count(A.shifted(M, sigma)); };
  double lo = -1.0, hi = 1.0;
  while (below(lo) > 0) lo *= 2.0;
  while (below(hi) == 0) {
    lo = std::max(lo, hi);
    hi *= 2.0;
    if (hi > 1e300) fail(ErrorKind::NonConvergence, "no eigenvalue found");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (below(mid) == 0 ? lo : hi) = mid;
  }

  // A - lo·M is positive definite (or singular at the eigenvalue): no pivoting needed.
  const SymTridiag shifted = A.shifted(M, lo);
  const std::size_t N = A.size();
  std::vector<double> x(N, 1.0);
  for (int it = 0; it < 4; ++it) {
    x = solve(shifted, M * x);
    const double norm = std::sqrt(M.quadratic_form(x));
    for (double& v : x) v /= norm;
  }
  if (x[0] < 0.0)
    for (double& v : x) v = -v;

  PencilEigenpair out;
  out.value = A.quadratic_form(x) / M.quadratic_form(x);
  const auto Ax = A * x;
  const auto Mx = M * x;
  double rn = 0.0, an = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = Ax[i] - out.value * Mx[i];
    rn += r * r;
    an += Ax[i] * Ax[i];
  }
  out.residual = std::sqrt(rn / an);
  out.vector = std::move(x);
  return out;
}

}  // namespace hardy
