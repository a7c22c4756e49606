#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "hardy/errors.hpp"

namespace hardy {

/// Dirichlet problem data on the ball B_radius(0) in R^n:
///   -Δu - γ u/|x|² - λ u = u^{2*(s)-1}/|x|^s.
struct ProblemParams {
  int n = 3;
  double gamma = 0.0;
  double s = 0.0;
  double lam = 0.0;
  double ball_radius = 1.0;

  /// (n-2)²/4, the Hardy constant; γ must stay strictly below it.
  double hardy_constant() const {
    const double c = 0.5 * (n - 2);
    return c * c;
  }

  void validate() const {
    if (n < 3) fail(ErrorKind::InvalidParams, "dimension n must be >= 3, got " + std::to_string(n));
    if (!(gamma < hardy_constant()))
      fail(ErrorKind::InvalidParams, "gamma must be < (n-2)^2/4 = " + std::to_string(hardy_constant()));
    if (!(s >= 0.0 && s < 2.0)) fail(ErrorKind::InvalidParams, "s must lie in [0, 2)");
    if (!(ball_radius > 0.0) || !std::isfinite(ball_radius))
      fail(ErrorKind::InvalidParams, "ball_radius must be positive");
    if (!std::isfinite(lam) || !std::isfinite(gamma)) fail(ErrorKind::InvalidParams, "non-finite parameter");
  }

  ProblemParams with_lambda(double l) const {
    ProblemParams q = *this;
    q.lam = l;
    return q;
  }
  ProblemParams with_radius(double r) const {
    ProblemParams q = *this;
    q.ball_radius = r;
    return q;
  }
};

struct Exponents {
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double gap = 0.0;         ///< beta_plus - beta_minus
  double two_star_s = 0.0;  ///< 2(n-s)/(n-2)
  double nu = 0.0;          ///< Bessel order gap/2
  double n_crit = 0.0;      ///< critical dimension n_γ
};

enum class SingularityKind { TrulySingular, MerelySingular };

inline std::string_view to_string(SingularityKind k) {
  return k == SingularityKind::TrulySingular ? "TrulySingular" : "MerelySingular";
}

struct RegimeTag {
  SingularityKind kind = SingularityKind::TrulySingular;
  bool low_dimensional = false;  ///< gap < 2; the borderline gap == 2 counts as high-dimensional
};

/// n_γ = 2√(γ+1) + 2 for γ ≥ -1, and 2 otherwise.
inline double critical_dimension(double gamma) {
  return gamma >= -1.0 ? 2.0 * std::sqrt(gamma + 1.0) + 2.0 : 2.0;
}

inline double hardy_sobolev_exponent(int n, double s) { return 2.0 * (n - s) / (n - 2); }

inline Exponents compute_exponents(const ProblemParams& p) {
  p.validate();
  const double c = 0.5 * (p.n - 2);
  const double d = std::sqrt(c * c - p.gamma);
  Exponents e;
  e.beta_plus = c + d;
  // β₊β₋ = γ; dividing avoids the cancellation in c - d.
  e.beta_minus = p.gamma / e.beta_plus;
  e.gap = 2.0 * d;
  e.two_star_s = hardy_sobolev_exponent(p.n, p.s);
  e.nu = d;
  e.n_crit = critical_dimension(p.gamma);
  return e;
}

inline RegimeTag classify_regime(const ProblemParams& p) {
  const Exponents e = compute_exponents(p);
  RegimeTag t;
  t.kind = (p.s > 0.0 || p.gamma > 0.0) ? SingularityKind::TrulySingular : SingularityKind::MerelySingular;
  t.low_dimensional = e.gap < 2.0;
  return t;
}

}  // namespace hardy
