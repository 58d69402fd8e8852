#pragma once

#include <cmath>
#include <stdexcept>

#include "nsk/grid.hpp"

namespace nsk {

/// The Orlicz gauge function: |x|^p for |x| <= delta, matched to
/// delta^(p-q) |x|^q beyond. Convex for q >= p > 1 and continuous at delta.
inline double orlicz_psi(double x, double p, double q, double delta) {
  double ax = std::abs(x);
  if (ax <= delta) return std::pow(ax, p);
  return std::pow(delta, p - q) * std::pow(ax, q);
}

/// Luxemburg-style norm inf { t > 0 : integral Psi(f/t) <= 1 } for the
/// space of fields p-integrable where small and q-integrable where large.
/// Computed by bracketing and bisecting the sign change of
/// integral Psi(f/t) - 1; returns 0 for the zero field.
inline double orlicz_norm(const ScalarField& f, double p, double q,
                          double delta) {
  if (!(p > 1.0)) throw std::invalid_argument("orlicz_norm: need p > 1");
  if (!(q >= p)) throw std::invalid_argument("orlicz_norm: need q >= p");
  if (!(delta > 0.0)) throw std::invalid_argument("orlicz_norm: need delta > 0");
  if (!all_finite(f))
    throw std::invalid_argument("orlicz_norm: field has non-finite values");

  double amax = max_abs(f);
  if (amax == 0.0) return 0.0;

  const double vol = f.grid().cell_volume();
  auto phi = [&](double t) {
    double s = 0.0;
    for (double v : f.values()) s += orlicz_psi(v / t, p, q, delta);
    return s * vol - 1.0;
  };

  // phi is strictly decreasing on (0, inf), +inf at 0+, -1 at infinity
  double hi = amax;
  while (phi(hi) > 0.0) hi *= 2.0;
  double lo = hi;
  while (phi(lo) <= 0.0) lo *= 0.5;
  while (hi - lo > 1e-12 * hi) {
    double mid = 0.5 * (lo + hi);
    (phi(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nsk
