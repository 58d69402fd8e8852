#pragma once

#include <random>

#include "nsk/grid.hpp"

namespace testing_helpers {

// engine-stream doubles so expected values are reproducible everywhere
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline nsk::ScalarField random_field(const nsk::Grid& g, std::mt19937_64& eng,
                                     double lo = 0.1, double hi = 2.0) {
  nsk::ScalarField f(g);
  for (auto& v : f.values()) v = lo + (hi - lo) * uniform01(eng);
  return f;
}

inline nsk::VectorField random_vector_field(const nsk::Grid& g,
                                            std::mt19937_64& eng,
                                            double lo = -1.0, double hi = 1.0) {
  nsk::VectorField f(g);
  for (auto& v : f.values()) v = lo + (hi - lo) * uniform01(eng);
  return f;
}

// periodic shift by (sx, sy) cells
inline nsk::ScalarField shift(const nsk::ScalarField& f, int sx, int sy = 0) {
  const nsk::Grid& g = f.grid();
  nsk::ScalarField out(g);
  const int n = g.n();
  for (int ix = 0; ix < n; ++ix) {
    int niy = g.dim() == 2 ? n : 1;
    for (int iy = 0; iy < niy; ++iy)
      out.at(g.wrap(ix + sx), g.wrap(iy + sy)) = f.at(ix, iy);
  }
  return out;
}

inline nsk::VectorField shift(const nsk::VectorField& f, int sx, int sy = 0) {
  const nsk::Grid& g = f.grid();
  nsk::VectorField out(g);
  const int n = g.n();
  for (int c = 0; c < g.dim(); ++c)
    for (int ix = 0; ix < n; ++ix) {
      int niy = g.dim() == 2 ? n : 1;
      for (int iy = 0; iy < niy; ++iy)
        out.comp(c, g.index(g.wrap(ix + sx), g.wrap(iy + sy))) =
            f.comp(c, g.index(ix, iy));
    }
  return out;
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing_helpers
