#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "nsk/grid.hpp"

namespace nsk {

namespace detail {

/// Monotone cubic (Fritsch-Carlson) interpolation. Nondecreasing data give a
/// nondecreasing interpolant between knots.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("MonotoneCubic: need >= 2 matching knots");
    d_.resize(n);
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      if (!(h[i] > 0.0))
        throw std::invalid_argument("MonotoneCubic: knots must increase");
      s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (s[i - 1] * s[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
      }
    }
    d_[0] = endpoint_slope(h[0], n > 2 ? h[1] : h[0], s[0],
                           n > 2 ? s[1] : s[0]);
    d_[n - 1] = endpoint_slope(h[n - 2], n > 2 ? h[n - 3] : h[n - 2], s[n - 2],
                               n > 2 ? s[n - 3] : s[n - 2]);
  }

  double value(double x) const {
    auto [i, t, h] = locate(x);
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
  }

  double derivative(double x) const {
    auto [i, t, h] = locate(x);
    double g00 = 6 * t * (t - 1) / h;
    double g10 = (1 - t) * (1 - 3 * t);
    double g01 = -g00;
    double g11 = t * (3 * t - 2);
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
  }

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  double y_back() const { return y_.back(); }
  double slope_back() const { return d_.back(); }

 private:
  static double endpoint_slope(double h0, double h1, double s0, double s1) {
    double d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0) return 0.0;
    if (std::abs(d) > 3 * std::abs(s0)) return 3 * s0;
    return d;
  }

  struct Loc {
    std::size_t i;
    double t;
    double h;
  };
  Loc locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i =
        std::clamp<std::ptrdiff_t>(it - x_.begin() - 1, 0,
                                   static_cast<std::ptrdiff_t>(x_.size()) - 2);
    double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  std::vector<double> x_, y_, d_;
};

/// Adaptive Simpson quadrature on a singularity-free interval.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int max_depth = 60) {
  auto simpson = [&](double lo, double hi, double flo, double fmid,
                     double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };
  struct Rec {
    double a, b, fa, fm, fb, whole, tol;
    int depth;
  };
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::vector<Rec> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    Rec r = stack.back();
    stack.pop_back();
    double m = 0.5 * (r.a + r.b);
    double lm = 0.5 * (r.a + m), rm = 0.5 * (m + r.b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(r.a, m, r.fa, flm, r.fm);
    double right = simpson(m, r.b, r.fm, frm, r.fb);
    double err = left + right - r.whole;
    if (r.depth >= max_depth || std::abs(err) <= 15.0 * r.tol) {
      total += left + right + err / 15.0;
    } else {
      stack.push_back({r.a, m, r.fa, flm, r.fm, left, r.tol / 2, r.depth + 1});
      stack.push_back({m, r.b, r.fm, frm, r.fb, right, r.tol / 2, r.depth + 1});
    }
  }
  return total;
}

}  // namespace detail

enum class PressureFamily { isentropic, van_der_waals, monotone_table };
enum class FreeEnergyBranch { power_law, log_reference, quadrature };

/// Pressure law P(rho) with derivative and free energy Pi(rho).
///
/// Pi is defined by Pi(s) = s * integral_0^s P(z)/z^2 dz, so that
/// P(s) = s Pi'(s) - Pi(s). When the integral diverges at 0 (any law with
/// P(z) ~ c z, c > 0) the reference-point form Pi(s) = s * integral_1^s
/// P(z)/z^2 dz is used instead; it satisfies the same identity.
class PressureLaw {
 public:
  /// P(rho) = a rho^gamma, a > 0, gamma >= 1.
  static PressureLaw isentropic(double a, double gamma) {
    if (!(a > 0.0)) throw std::invalid_argument("isentropic: a must be > 0");
    if (!(gamma >= 1.0))
      throw std::invalid_argument("isentropic: gamma must be >= 1");
    PressureLaw law;
    law.impl_ = Isentropic{a, gamma};
    return law;
  }

  /// P(rho) = R T* rho / (b - rho) - a rho^2 for rho <= b - theta, extended
  /// C1 beyond: a quadratic that brings the slope to +1 across a width
  /// theta, then linear. The global lower bound of P' is computed and
  /// stored at construction.
  static PressureLaw van_der_waals(double R, double T_star, double a, double b,
                                   double theta) {
    if (!(R > 0.0 && T_star > 0.0 && a > 0.0 && b > 0.0))
      throw std::invalid_argument("van_der_waals: R, T*, a, b must be > 0");
    if (!(theta > 0.0 && theta < b))
      throw std::invalid_argument("van_der_waals: need 0 < theta < b");
    VanDerWaals v;
    v.RT = R * T_star;
    v.a = a;
    v.b = b;
    v.theta = theta;
    v.rho_join = b - theta;
    v.p_join = v.RT * v.rho_join / theta - a * v.rho_join * v.rho_join;
    v.s_join = v.RT * b / (theta * theta) - 2.0 * a * v.rho_join;
    v.quad_c = (1.0 - v.s_join) / (2.0 * theta);
    v.rho_lin = b;  // rho_join + theta
    v.p_lin = v.p_join + theta * (1.0 + v.s_join) / 2.0;
    v.dp_lower_bound = vdw_dp_lower_bound(v);
    PressureLaw law;
    law.impl_ = v;
    return law;
  }

  /// Tabulated nondecreasing law; knots must start at (0, 0). Monotone
  /// cubic interpolation keeps P nondecreasing between knots; beyond the
  /// last knot the law continues linearly with the end slope.
  static PressureLaw monotone_table(std::vector<double> rho,
                                    std::vector<double> p) {
    if (rho.size() != p.size() || rho.size() < 2)
      throw std::invalid_argument("monotone_table: need >= 2 matching knots");
    if (rho.front() != 0.0 || p.front() != 0.0)
      throw std::invalid_argument("monotone_table: first knot must be (0, 0)");
    for (std::size_t i = 0; i + 1 < rho.size(); ++i)
      if (p[i + 1] < p[i])
        throw std::invalid_argument("monotone_table: P samples must not decrease");
    MonotoneTable t;
    t.interp = detail::MonotoneCubic(std::move(rho), std::move(p));
    PressureLaw law;
    law.impl_ = std::move(t);
    return law;
  }

  PressureFamily family() const {
    return static_cast<PressureFamily>(impl_.index());
  }

  double pressure(double rho) const {
    require_nonneg(rho);
    if (const auto* is = std::get_if<Isentropic>(&impl_))
      return is->a * std::pow(rho, is->gamma);
    if (const auto* v = std::get_if<VanDerWaals>(&impl_)) {
      if (rho <= v->rho_join)
        return v->RT * rho / (v->b - rho) - v->a * rho * rho;
      if (rho <= v->rho_lin) {
        double d = rho - v->rho_join;
        return v->p_join + v->s_join * d + v->quad_c * d * d;
      }
      return v->p_lin + (rho - v->rho_lin);
    }
    const auto& t = std::get<MonotoneTable>(impl_);
    if (rho > t.interp.x_back())
      return t.interp.y_back() + t.interp.slope_back() * (rho - t.interp.x_back());
    return t.interp.value(rho);
  }

  double dpressure(double rho) const {
    require_nonneg(rho);
    if (const auto* is = std::get_if<Isentropic>(&impl_)) {
      if (is->gamma == 1.0) return is->a;
      return is->a * is->gamma * std::pow(rho, is->gamma - 1.0);
    }
    if (const auto* v = std::get_if<VanDerWaals>(&impl_)) {
      if (rho <= v->rho_join) {
        double bm = v->b - rho;
        return v->RT * v->b / (bm * bm) - 2.0 * v->a * rho;
      }
      if (rho <= v->rho_lin)
        return v->s_join + 2.0 * v->quad_c * (rho - v->rho_join);
      return 1.0;
    }
    const auto& t = std::get<MonotoneTable>(impl_);
    if (rho > t.interp.x_back()) return t.interp.slope_back();
    return t.interp.derivative(rho);
  }

  FreeEnergyBranch free_energy_branch() const {
    if (const auto* is = std::get_if<Isentropic>(&impl_))
      return is->gamma > 1.0 ? FreeEnergyBranch::power_law
                             : FreeEnergyBranch::log_reference;
    if (std::holds_alternative<VanDerWaals>(impl_))
      return FreeEnergyBranch::log_reference;  // P ~ (RT/b) rho near 0
    return FreeEnergyBranch::quadrature;
  }

  /// Free energy Pi(rho); Pi(0) = 0 in every branch.
  double free_energy(double rho) const {
    require_nonneg(rho);
    if (rho == 0.0) return 0.0;
    switch (free_energy_branch()) {
      case FreeEnergyBranch::power_law: {
        const auto& is = std::get<Isentropic>(impl_);
        return is.a * std::pow(rho, is.gamma) / (is.gamma - 1.0);
      }
      case FreeEnergyBranch::log_reference: {
        if (const auto* is = std::get_if<Isentropic>(&impl_))
          return is->a * rho * std::log(rho);
        // reference-point form: rho * integral_1^rho P(s)/s^2 ds
        auto f = [this](double s) { return pressure(s) / (s * s); };
        double sign = rho >= 1.0 ? 1.0 : -1.0;
        double lo = std::min(rho, 1.0), hi = std::max(rho, 1.0);
        double integral =
            sign * detail::adaptive_simpson(f, lo, hi, 1e-13 * std::max(1.0, hi));
        return rho * integral;
      }
      case FreeEnergyBranch::quadrature:
        return rho * integral_from_zero(rho);
    }
    return 0.0;  // unreachable
  }

  /// Stored global lower bound for P' (Van der Waals only).
  double dpressure_lower_bound() const {
    if (const auto* v = std::get_if<VanDerWaals>(&impl_))
      return v->dp_lower_bound;
    return 0.0;  // isentropic and monotone-table laws are nondecreasing
  }

  struct VdwInfo {
    double RT, a, b, theta, rho_join, rho_lin;
  };
  VdwInfo vdw_info() const {
    const auto* v = std::get_if<VanDerWaals>(&impl_);
    if (!v) throw std::logic_error("vdw_info: not a Van der Waals law");
    return {v->RT, v->a, v->b, v->theta, v->rho_join, v->rho_lin};
  }

 private:
  struct Isentropic {
    double a, gamma;
  };
  struct VanDerWaals {
    double RT, a, b, theta;
    double rho_join, p_join, s_join, quad_c, rho_lin, p_lin;
    double dp_lower_bound;
  };
  struct MonotoneTable {
    detail::MonotoneCubic interp;
  };

  static void require_nonneg(double rho) {
    if (!(rho >= 0.0))
      throw std::invalid_argument("pressure law: density must be >= 0, got " +
                                  std::to_string(rho));
  }

  // Minimum of P' over (0, inf): interior critical point of the rational
  // branch, the join slopes, and the extension slopes (quadratic branch is
  // linear in P', linear branch is 1).
  static double vdw_dp_lower_bound(const VanDerWaals& v) {
    auto dp_raw = [&](double rho) {
      double bm = v.b - rho;
      return v.RT * v.b / (bm * bm) - 2.0 * v.a * rho;
    };
    double bound = std::min({dp_raw(0.0), v.s_join, std::min(v.s_join, 1.0)});
    double crit = v.b - std::cbrt(v.RT * v.b / v.a);  // where P'' = 0
    if (crit > 0.0 && crit < v.rho_join) bound = std::min(bound, dp_raw(crit));
    return bound;
  }

  // integral_0^rho P(z)/z^2 dz by dyadic subdivision toward zero with
  // geometric-decay monitoring; throws if the contributions stall, which
  // signals a non-integrable singularity.
  double integral_from_zero(double rho) const {
    auto f = [this](double s) { return pressure(s) / (s * s); };
    double total = 0.0;
    double upper = rho;
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 600; ++level) {
      double lower = 0.5 * upper;
      double c = detail::adaptive_simpson(f, lower, upper,
                                          1e-14 * std::max(1.0, rho));
      total += c;
      if (std::abs(c) <= 1e-15 * (1.0 + std::abs(total))) return total;
      if (level >= 8 && std::abs(c) > 0.95 * std::abs(prev))
        throw std::runtime_error(
            "free_energy: quadrature failure, P(z)/z^2 is not integrable at 0");
      prev = c;
      upper = lower;
    }
    throw std::runtime_error(
        "free_energy: quadrature failure, dyadic refinement did not converge");
  }

  std::variant<Isentropic, VanDerWaals, MonotoneTable> impl_;
};

/// Relative free energy j_gamma(rho) = rho^g + (g-1) rho_bar^g
/// - g rho_bar^(g-1) rho. Convex in rho with minimum value 0 at rho_bar.
inline double j_gamma(double rho, double rho_bar, double gamma) {
  if (!(rho >= 0.0)) throw std::invalid_argument("j_gamma: rho must be >= 0");
  if (!(rho_bar > 0.0))
    throw std::invalid_argument("j_gamma: rho_bar must be > 0");
  if (!(gamma >= 1.0)) throw std::invalid_argument("j_gamma: gamma must be >= 1");
  return std::pow(rho, gamma) + (gamma - 1.0) * std::pow(rho_bar, gamma) -
         gamma * std::pow(rho_bar, gamma - 1.0) * rho;
}

/// Splitting P = P1 - P2 of a Van der Waals law: P1 nondecreasing, P2 >= 0
/// smooth with compact support, P2(rho) = 0 for rho >= rho_bar_split.
///
/// P2 is assembled from the negative part of P': g = max(0, -P') is dilated
/// and mollified (C2 bump of half-width theta/4) into G >= g, accumulated
/// into R(rho) = integral_0^rho G, and then released through a smoothstep
/// window in P-arclength whose slope never exceeds P', so that
/// P1 = P + P2 stays nondecreasing while P2 = R - S returns to zero.
class SplitPressure {
 public:
  explicit SplitPressure(const PressureLaw& law) : law_(law) {
    if (law.family() != PressureFamily::van_der_waals)
      throw std::invalid_argument("split: requires a Van der Waals law");
    build();
  }

  double p1(double rho) const { return law_.pressure(rho) + p2(rho); }

  double p2(double rho) const {
    if (trivial_ || rho >= rho_bar_split_) return 0.0;
    return r_of(rho) - s_of(rho);
  }

  double rho_bar_split() const { return rho_bar_split_; }
  const PressureLaw& law() const { return law_; }

  /// CSV table (rho, P, P1, P2) on a uniform sample.
  void write_csv(std::ostream& os, int rows = 1024) const {
    double hi = std::max(rho_bar_split_ * 1.2, law_.vdw_info().b * 1.5);
    os << "rho,P,P1,P2\n";
    char buf[128];
    for (int i = 0; i < rows; ++i) {
      double rho = hi * i / (rows - 1);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", rho,
                    law_.pressure(rho), p1(rho), p2(rho));
      os << buf;
    }
  }

 private:
  void build() {
    auto info = law_.vdw_info();
    w_ = info.theta / 4.0;
    const double dx = w_ / 128.0;
    const double scan_hi = info.rho_lin + info.theta;

    // locate the negative-slope window of P'
    double neg_start = -1.0, neg_end = -1.0;
    int nscan = static_cast<int>(scan_hi / dx) + 2;
    for (int i = 0; i <= nscan; ++i) {
      double rho = i * dx;
      if (law_.dpressure(rho) < 0.0) {
        if (neg_start < 0.0) neg_start = rho;
        neg_end = rho;
      }
    }
    if (neg_end >= info.rho_lin)
      throw std::runtime_error(
          "split: P' < 0 persists into the forced-monotone extension");
    if (neg_start < 0.0) {  // monotone law, nothing to subtract
      trivial_ = true;
      rho_bar_split_ = 0.0;
      return;
    }
    trivial_ = false;

    // g = max(0, -P'), dilated by w then mollified with a C2 bump of
    // half-width w; G >= g pointwise, support ends at neg_end + 2w.
    const int npts = static_cast<int>((neg_end + 2.0 * w_) / dx) + 3;
    const int wn = 128;  // w / dx
    std::vector<double> g(npts, 0.0);
    for (int i = 0; i < npts; ++i)
      g[i] = std::max(0.0, -law_.dpressure(i * dx));
    std::vector<double> gw(npts, 0.0);
    for (int i = 0; i < npts; ++i) {
      double m = 0.0;
      for (int j = std::max(0, i - wn); j <= std::min(npts - 1, i + wn); ++j)
        m = std::max(m, g[j]);
      gw[i] = m;
    }
    std::vector<double> eta(2 * wn + 1);
    double esum = 0.0;
    for (int j = -wn; j <= wn; ++j) {
      double t = static_cast<double>(j) / wn;
      eta[j + wn] = std::pow(1.0 - t * t, 3);
      esum += eta[j + wn];
    }
    for (auto& e : eta) e /= esum;  // discrete unit mass
    grid_rho_.resize(npts);
    std::vector<double> G(npts, 0.0);
    for (int i = 0; i < npts; ++i) {
      grid_rho_[i] = i * dx;
      double acc = 0.0;
      for (int j = -wn; j <= wn; ++j) {
        int idx = i + j;
        if (idx >= 0 && idx < npts) acc += eta[j + wn] * gw[idx];
      }
      G[i] = acc;
    }

    // cumulative trapezoid R and the total charge A
    r_cum_.assign(npts, 0.0);
    for (int i = 1; i < npts; ++i)
      r_cum_[i] = r_cum_[i - 1] + 0.5 * dx * (G[i - 1] + G[i]);
    charge_ = r_cum_.back();
    support_end_ = grid_rho_.back();

    // release window: S climbs from 0 to A as P climbs by W_need = 2A past
    // the support end; smoothstep slope max 15/8 keeps S' <= (15/16) P'.
    rho_onset_ = support_end_;
    p_onset_ = law_.pressure(rho_onset_);
    w_need_ = 2.0 * charge_;
    double lo = rho_onset_, hi = rho_onset_ + 1.0;
    while (law_.pressure(hi) < p_onset_ + w_need_) hi += hi - rho_onset_;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (law_.pressure(mid) < p_onset_ + w_need_ ? lo : hi) = mid;
    }
    rho_bar_split_ = hi;
  }

  double r_of(double rho) const {
    if (rho >= support_end_) return charge_;
    if (rho <= 0.0) return 0.0;
    double pos = rho / (grid_rho_[1] - grid_rho_[0]);
    auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= r_cum_.size()) return charge_;
    double t = pos - static_cast<double>(i);
    return (1.0 - t) * r_cum_[i] + t * r_cum_[i + 1];
  }

  double s_of(double rho) const {
    if (rho <= rho_onset_) return 0.0;
    double t = (law_.pressure(rho) - p_onset_) / w_need_;
    t = std::clamp(t, 0.0, 1.0);
    double step = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    return charge_ * step;
  }

  PressureLaw law_;
  bool trivial_ = true;
  double w_ = 0.0;
  double charge_ = 0.0;       // A = integral of G
  double support_end_ = 0.0;  // last rho with G > 0
  double rho_onset_ = 0.0, p_onset_ = 0.0, w_need_ = 0.0;
  double rho_bar_split_ = 0.0;
  std::vector<double> grid_rho_, r_cum_;
};

inline SplitPressure split_vdw(const PressureLaw& law) {
  return SplitPressure(law);
}

}  // namespace nsk
