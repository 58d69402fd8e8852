#pragma once

#include "nsk/kernel.hpp"

// Brute-force reference evaluations. These deliberately avoid the spectral
// path: plain wrapped-index double sums over the same discrete kernel
// samples, used as oracles for the fast implementations.

namespace nsk::reference {

/// Direct circular convolution: out(i) = h^dim sum_j phi(i - j) f(j).
inline ScalarField convolve_direct(const Kernel& k, const ScalarField& f) {
  k.require_same_grid(f.grid());
  const Grid& g = f.grid();
  const int n = g.n();
  const auto& phi = k.samples();
  ScalarField out(g, 0.0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += phi[g.wrap(i - j)] * f[j];
      out[i] = s * g.cell_volume();
    }
    return out;
  }
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      double s = 0.0;
      for (int jx = 0; jx < n; ++jx)
        for (int jy = 0; jy < n; ++jy)
          s += phi[g.index(g.wrap(ix - jx), g.wrap(iy - jy))] *
               f.at(jx, jy);
      out.at(ix, iy) = s * g.cell_volume();
    }
  return out;
}

/// Direct double integral
/// (kappa/4) sum_x sum_y phi(x - y) (rho(y) - rho(x))^2 h^(2 dim).
inline double interaction_energy_direct(const Kernel& k,
                                        const ScalarField& rho, double kappa) {
  k.require_same_grid(rho.grid());
  const Grid& g = rho.grid();
  const int n = g.n();
  const auto& phi = k.samples();
  double s = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d = rho[j] - rho[i];
        s += phi[g.wrap(i - j)] * d * d;
      }
  } else {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int jx = 0; jx < n; ++jx)
          for (int jy = 0; jy < n; ++jy) {
            double d = rho.at(jx, jy) - rho.at(ix, iy);
            s += phi[g.index(g.wrap(ix - jx), g.wrap(iy - jy))] * d * d;
          }
  }
  double v = g.cell_volume();
  return 0.25 * kappa * s * v * v;
}

}  // namespace nsk::reference
