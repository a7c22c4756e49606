#pragma once

#include <cmath>
#include <cstdint>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "hardy/errors.hpp"

namespace hardy {

/// First positive zero j_{ν,1} of J_ν, ν ≥ 0.
inline double bessel_first_zero(double nu) {
  if (!(nu >= 0.0)) fail(ErrorKind::InvalidParams, "order must be nonnegative");
  return boost::math::cyl_bessel_j_zero(nu, 1);
}

/// First positive zero of J_{-ν} for 0 ≤ ν < 1. It lies in (0, j_{ν,1}) and
/// J_{-ν} is positive before it.
inline double bessel_negative_order_first_zero(double nu) {
  if (!(nu >= 0.0 && nu < 1.0)) fail(ErrorKind::InvalidParams, "order must lie in [0, 1)");
  if (nu == 0.0) return bessel_first_zero(0.0);
  const double upper = bessel_first_zero(nu);
  auto f = [nu](double x) { return boost::math::cyl_bessel_j(-nu, x); };
  double a = 1e-3 * upper, fa = f(a);
  const double step = 1e-2 * upper;
  double b = a, fb = fa;
  while (fb > 0.0) {
    a = b;
    fa = fb;
    b = std::min(b + step, upper);
    fb = f(b);
    if (b >= upper && fb > 0.0) fail(ErrorKind::NoSignChange, "J_{-nu} has no zero below j_{nu,1}");
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace hardy
