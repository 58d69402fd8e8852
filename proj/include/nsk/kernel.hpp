#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "nsk/grid.hpp"
#include "nsk/operators.hpp"

namespace nsk {

namespace detail {

/// Real-to-complex FFT plans shared per (dim, n). Plan creation is
/// serialized behind a mutex; execution uses the new-array interface and is
/// reentrant. FFTW_UNALIGNED lets plans run on plain std::vector storage.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  static std::size_t spectrum_size(const Grid& g) {
    auto n = static_cast<std::size_t>(g.n());
    return g.dim() == 1 ? n / 2 + 1 : n * (n / 2 + 1);
  }

  void forward(const Grid& g, const double* in, std::complex<double>* out) {
    const Entry& e = entry(g);
    fftw_execute_dft_r2c(e.fwd, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }

  // Unnormalized inverse; caller divides by the total cell count.
  // The input buffer is clobbered (FFTW c2r semantics).
  void backward(const Grid& g, std::complex<double>* in, double* out) {
    const Entry& e = entry(g);
    fftw_execute_dft_c2r(e.bwd, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  struct Entry {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  const Entry& entry(const Grid& g) {
    std::scoped_lock lock(mu_);
    auto key = std::pair(g.dim(), g.n());
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<double> real(g.cell_count());
    std::vector<std::complex<double>> cplx(spectrum_size(g));
    auto* cp = reinterpret_cast<fftw_complex*>(cplx.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Entry e;
    if (g.dim() == 1) {
      e.fwd = fftw_plan_dft_r2c_1d(g.n(), real.data(), cp, flags);
      e.bwd = fftw_plan_dft_c2r_1d(g.n(), cp, real.data(), flags);
    } else {
      e.fwd = fftw_plan_dft_r2c_2d(g.n(), g.n(), real.data(), cp, flags);
      e.bwd = fftw_plan_dft_c2r_2d(g.n(), g.n(), cp, real.data(), flags);
    }
    if (!e.fwd || !e.bwd) throw std::runtime_error("FFTW plan creation failed");
    return plans_.emplace(key, e).first->second;
  }

  std::mutex mu_;
  std::map<std::pair<int, int>, Entry> plans_;
};

}  // namespace detail

/// Specification of a capillarity kernel shape before discretization.
struct GaussianKernelSpec {
  double sigma;  // truncated at 4*sigma, then renormalized
};
struct TentKernelSpec {
  double radius;  // max(0, 1 - |x|/r), renormalized
};

/// Discretized admissible capillarity kernel on the torus.
///
/// Invariants enforced at construction: samples >= 0, even under x -> -x,
/// discrete mass sum(phi) * h^dim == 1 (renormalized after sampling), and
/// support radius < L/2 so the periodic convolution cannot wrap.
class Kernel {
 public:
  static Kernel gaussian(const Grid& grid, double sigma) {
    if (!(sigma > 0.0))
      throw std::invalid_argument("kernel: gaussian sigma must be positive");
    const double cutoff = 4.0 * sigma;
    check_support(grid, cutoff);
    std::vector<double> s(grid.cell_count());
    sample_radial(grid, s, [&](double r) {
      return r <= cutoff ? std::exp(-r * r / (2.0 * sigma * sigma)) : 0.0;
    });
    return Kernel(grid, std::move(s), cutoff);
  }

  static Kernel tent(const Grid& grid, double radius) {
    if (!(radius > 0.0))
      throw std::invalid_argument("kernel: tent radius must be positive");
    check_support(grid, radius);
    std::vector<double> s(grid.cell_count());
    sample_radial(grid, s,
                  [&](double r) { return std::max(0.0, 1.0 - r / radius); });
    return Kernel(grid, std::move(s), radius);
  }

  /// Build from explicit samples (cell 0 at the origin). Rejects negative
  /// entries and even-symmetry violations beyond 1e-12 of the max sample.
  static Kernel from_samples(const Grid& grid, std::vector<double> samples) {
    if (samples.size() != grid.cell_count())
      throw std::invalid_argument("kernel: sample count does not match grid");
    double m = max_abs(std::span<const double>(samples));
    const int n = grid.n();
    double radius = 0.0;
    for (int ix = 0; ix < n; ++ix) {
      const int jx = grid.wrap(-ix);
      const int niy = grid.dim() == 2 ? n : 1;
      for (int iy = 0; iy < niy; ++iy) {
        double v = samples[grid.index(ix, iy)];
        if (v < 0.0)
          throw std::invalid_argument("kernel: negative sample rejected");
        double mirror = samples[grid.index(jx, grid.wrap(-iy))];
        if (std::abs(v - mirror) > 1e-12 * std::max(1.0, m))
          throw std::invalid_argument("kernel: samples not even on the torus");
        if (v > 0.0) {
          double x = grid.signed_coord(ix);
          double y = grid.dim() == 2 ? grid.signed_coord(iy) : 0.0;
          radius = std::max(radius, std::hypot(x, y));
        }
      }
    }
    check_support(grid, radius);
    return Kernel(grid, std::move(samples), radius);
  }

  static Kernel build(const Grid& grid, const GaussianKernelSpec& s) {
    return gaussian(grid, s.sigma);
  }
  static Kernel build(const Grid& grid, const TentKernelSpec& s) {
    return tent(grid, s.radius);
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& samples() const { return samples_; }
  double support_radius() const { return support_radius_; }

  /// Circular convolution phi * f, computed spectrally. Matches the direct
  /// O(n^2) double sum to roundoff and is bit-stable across calls.
  ScalarField convolve(const ScalarField& f) const {
    require_same_grid(f.grid());
    const std::size_t ns = spectrum_.size();
    std::vector<std::complex<double>> hat(ns);
    auto& plans = detail::FftPlans::instance();
    plans.forward(grid_, f.data(), hat.data());
    for (std::size_t i = 0; i < ns; ++i) hat[i] *= spectrum_[i];
    ScalarField out(grid_);
    plans.backward(grid_, hat.data(), out.data());
    const double scale = 1.0 / static_cast<double>(grid_.cell_count());
    for (auto& v : out.values()) v *= scale;
    return out;
  }

  void require_same_grid(const Grid& other) const {
    if (other != grid_)
      throw std::invalid_argument("kernel/field grid mismatch");
  }

 private:
  Kernel(const Grid& grid, std::vector<double> samples, double radius)
      : grid_(grid), samples_(std::move(samples)), support_radius_(radius) {
    renormalize();
    spectrum_.resize(detail::FftPlans::spectrum_size(grid_));
    detail::FftPlans::instance().forward(grid_, samples_.data(),
                                         spectrum_.data());
    // Fold the h^dim quadrature weight into the cached transform so that
    // convolve() approximates the continuous convolution directly.
    for (auto& c : spectrum_) c *= grid_.cell_volume();
  }

  static void check_support(const Grid& grid, double radius) {
    if (radius >= grid.extent() / 2)
      throw std::invalid_argument(
          "kernel wraps torus: support radius " + std::to_string(radius) +
          " >= L/2 = " + std::to_string(grid.extent() / 2));
  }

  template <class F>
  static void sample_radial(const Grid& grid, std::vector<double>& s, F&& phi) {
    const int n = grid.n();
    if (grid.dim() == 1) {
      for (int i = 0; i < n; ++i)
        s[i] = phi(std::abs(grid.signed_coord(i)));
    } else {
      for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
          s[grid.index(ix, iy)] =
              phi(std::hypot(grid.signed_coord(ix), grid.signed_coord(iy)));
    }
  }

  void renormalize() {
    double mass = detail::compensated_sum(samples_) * grid_.cell_volume();
    if (!(mass > 0.0))
      throw std::invalid_argument("kernel: zero mass after sampling");
    for (auto& v : samples_) v /= mass;
  }

  Grid grid_;
  std::vector<double> samples_;
  std::vector<std::complex<double>> spectrum_;  // FFT(samples) * h^dim
  double support_radius_;
};

/// Nonlocal capillarity operator D[rho] = phi * rho - rho.
inline ScalarField capillarity_d(const Kernel& k, const ScalarField& rho) {
  k.require_same_grid(rho.grid());
  ScalarField out = k.convolve(rho);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rho[i];
  return out;
}

/// Capillary force density kappa * rho * grad(D[rho]).
inline VectorField capillary_force(const Kernel& k, const ScalarField& rho,
                                   double kappa) {
  k.require_same_grid(rho.grid());
  if (!(kappa >= 0.0))
    throw std::invalid_argument("capillary_force: kappa must be >= 0");
  VectorField out(rho.grid());
  if (kappa == 0.0) return out;
  VectorField gd = gradient(capillarity_d(k, rho));
  for (int c = 0; c < out.ncomp(); ++c) {
    auto g = gd.component(c);
    auto o = out.component(c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = kappa * rho[i] * g[i];
  }
  return out;
}

/// Interaction energy (kappa/4) integral of phi(x-y) (rho(y)-rho(x))^2,
/// evaluated through the expansion rho^2 + phi*rho^2 - 2 rho (phi*rho).
inline double interaction_energy(const Kernel& k, const ScalarField& rho,
                                 double kappa) {
  k.require_same_grid(rho.grid());
  if (!(kappa >= 0.0))
    throw std::invalid_argument("interaction_energy: kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  ScalarField rho2 = cellwise_product(rho, rho);
  ScalarField conv_rho = k.convolve(rho);
  ScalarField conv_rho2 = k.convolve(rho2);
  ScalarField integrand(rho.grid());
  for (std::size_t i = 0; i < integrand.size(); ++i)
    integrand[i] = rho2[i] + conv_rho2[i] - 2.0 * rho[i] * conv_rho[i];
  return 0.25 * kappa * integrate(integrand);
}

}  // namespace nsk
