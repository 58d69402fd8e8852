#pragma once

#include "nsk/grid.hpp"

// Centered second-order periodic difference operators. All of them
// annihilate constants exactly and commute with periodic shifts.

namespace nsk {

namespace detail {

// Apply a 1D three-point stencil (cm, c0, cp) along one axis.
inline void axis_stencil(const Grid& g, std::span<const double> in,
                         std::span<double> out, int axis, double cm, double c0,
                         double cp, bool accumulate) {
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double v = cm * in[g.wrap(i - 1)] + c0 * in[i] + cp * in[g.wrap(i + 1)];
      out[i] = accumulate ? out[i] + v : v;
    }
    return;
  }
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      std::size_t im, ip;
      if (axis == 0) {
        im = g.index(g.wrap(ix - 1), iy);
        ip = g.index(g.wrap(ix + 1), iy);
      } else {
        im = g.index(ix, g.wrap(iy - 1));
        ip = g.index(ix, g.wrap(iy + 1));
      }
      std::size_t i = g.index(ix, iy);
      double v = cm * in[im] + c0 * in[i] + cp * in[ip];
      out[i] = accumulate ? out[i] + v : v;
    }
  }
}

}  // namespace detail

/// Centered gradient: component d is (f(i+e_d) - f(i-e_d)) / (2h).
inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const double c = 1.0 / (2.0 * g.h());
  for (int d = 0; d < g.dim(); ++d)
    detail::axis_stencil(g, f.values(), out.component(d), d, -c, 0.0, c, false);
  return out;
}

/// Centered divergence: sum over axes of (v_d(i+e_d) - v_d(i-e_d)) / (2h).
inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g, 0.0);
  const double c = 1.0 / (2.0 * g.h());
  for (int d = 0; d < g.dim(); ++d)
    detail::axis_stencil(g, v.component(d), out.values(), d, -c, 0.0, c, true);
  return out;
}

/// 3-point (1D) / 5-point (2D) periodic Laplacian.
inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g, 0.0);
  const double c = 1.0 / (g.h() * g.h());
  for (int d = 0; d < g.dim(); ++d)
    detail::axis_stencil(g, f.values(), out.values(), d, c, -2.0 * c, c, true);
  return out;
}

/// Componentwise Laplacian.
inline VectorField laplacian_vector(const VectorField& v) {
  const Grid& g = v.grid();
  VectorField out(g, 0.0);
  const double c = 1.0 / (g.h() * g.h());
  for (int e = 0; e < g.dim(); ++e)
    for (int d = 0; d < g.dim(); ++d)
      detail::axis_stencil(g, v.component(e), out.component(e), d, c, -2.0 * c,
                           c, true);
  return out;
}

/// grad(div v), composed from the two centered stencils.
inline VectorField grad_div(const VectorField& v) {
  return gradient(divergence(v));
}

}  // namespace nsk
