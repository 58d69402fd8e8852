#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsk {

/// Uniform periodic lattice on [0,L)^dim, dim 1 or 2.
///
/// Cell i along an axis sits at x = i*h with h = L/n. n must be a power of
/// two (the spectral transforms require it) and at least 8. The torus has no
/// boundary; every difference operator wraps.
class Grid {
 public:
  Grid(int dim, int n, double extent) : dim_(dim), n_(n), extent_(extent) {
    if (dim != 1 && dim != 2)
      throw std::invalid_argument("Grid: dim must be 1 or 2, got " +
                                  std::to_string(dim));
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument(
          "Grid: n must be a power of two >= 8, got " + std::to_string(n));
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw std::invalid_argument("Grid: extent L must be positive");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  double extent() const { return extent_; }
  double h() const { return extent_ / n_; }

  std::size_t cell_count() const {
    auto nn = static_cast<std::size_t>(n_);
    return dim_ == 1 ? nn : nn * nn;
  }

  /// Cell volume h^dim.
  double cell_volume() const { return dim_ == 1 ? h() : h() * h(); }

  /// Row-major index; axis 0 is the slow axis.
  std::size_t index(int ix, int iy = 0) const {
    return static_cast<std::size_t>(ix) * (dim_ == 2 ? n_ : 1) +
           static_cast<std::size_t>(dim_ == 2 ? iy : 0);
  }

  int wrap(int i) const {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  double coord(int i) const { return i * h(); }

  /// Signed periodic offset from the origin, in [-L/2, L/2).
  double signed_coord(int i) const {
    double x = coord(wrap(i));
    return x >= extent_ / 2 ? x - extent_ : x;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int n_;
  double extent_;
};

namespace detail {

/// Neumaier-compensated sum; keeps conservation checks at roundoff level.
inline double compensated_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace detail

/// One real value per cell.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0)
      : grid_(grid), v_(grid.cell_count(), fill) {}

  ScalarField(const Grid& grid, std::vector<double> values)
      : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.cell_count())
      throw std::invalid_argument("ScalarField: value count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& at(int ix, int iy = 0) { return v_[grid_.index(ix, iy)]; }
  double at(int ix, int iy = 0) const { return v_[grid_.index(ix, iy)]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// dim real components per cell, stored as per-component planes.
class VectorField {
 public:
  explicit VectorField(const Grid& grid, double fill = 0.0)
      : grid_(grid), v_(grid.cell_count() * grid.dim(), fill) {}

  VectorField(const Grid& grid, std::vector<double> values)
      : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.cell_count() * grid_.dim())
      throw std::invalid_argument("VectorField: value count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  int ncomp() const { return grid_.dim(); }
  std::size_t size() const { return v_.size(); }

  double& comp(int c, std::size_t i) { return v_[plane(c) + i]; }
  double comp(int c, std::size_t i) const { return v_[plane(c) + i]; }
  std::span<double> component(int c) {
    return {v_.data() + plane(c), grid_.cell_count()};
  }
  std::span<const double> component(int c) const {
    return {v_.data() + plane(c), grid_.cell_count()};
  }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

 private:
  std::size_t plane(int c) const {
    return static_cast<std::size_t>(c) * grid_.cell_count();
  }
  Grid grid_;
  std::vector<double> v_;
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}
inline bool all_finite(const ScalarField& f) { return all_finite(f.values()); }
inline bool all_finite(const VectorField& f) { return all_finite(f.values()); }

/// Discrete integral over the torus: sum of cell values times h^dim.
inline double integrate(const ScalarField& f) {
  return detail::compensated_sum(f.values()) * f.grid().cell_volume();
}

/// (sum |v|^p h^dim)^(1/p); rejects p < 1.
inline double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("lp_norm: p must be >= 1, got " +
                                std::to_string(p));
  double s = 0.0;
  for (double x : f.values()) s += std::pow(std::abs(x), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
inline double max_abs(const ScalarField& f) { return max_abs(f.values()); }
inline double max_abs(const VectorField& f) { return max_abs(f.values()); }

// Small value-semantics helpers; fields are immutable inputs everywhere else.
inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("field grid mismatch");
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("field grid mismatch");
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}
inline ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r = a;
  for (auto& x : r.values()) x *= s;
  return r;
}
inline ScalarField operator-(const ScalarField& a, double s) {
  ScalarField r = a;
  for (auto& x : r.values()) x -= s;
  return r;
}
inline ScalarField cellwise_product(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("field grid mismatch");
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= b[i];
  return r;
}

}  // namespace nsk
