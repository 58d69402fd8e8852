#pragma once

#include <optional>
#include <ostream>

#include "nsk/kernel.hpp"
#include "nsk/orlicz.hpp"
#include "nsk/pressure.hpp"
#include "nsk/solver.hpp"

namespace nsk {

// ---------------------------------------------------------------------------
// energies and dissipation

struct Energies {
  double kinetic = 0.0;   // integral of |m|^2 / (2 rho), 0 on vacuum cells
  double free = 0.0;      // integral of Pi(rho)
  double nonlocal = 0.0;  // interaction energy
  double total() const { return kinetic + free + nonlocal; }
};

/// Total energy split. Kinetic density uses the vacuum convention: it is 0
/// wherever rho sits at or below the vacuum floor.
inline Energies total_energy(const State& s, const PhysParams& p,
                             double eps_vac) {
  const Grid& g = s.rho.grid();
  ScalarField kin(g), fre(g);
  for (std::size_t i = 0; i < kin.size(); ++i) {
    double m2 = 0.0;
    for (int c = 0; c < g.dim(); ++c) m2 += s.m.comp(c, i) * s.m.comp(c, i);
    kin[i] = s.rho[i] > eps_vac ? 0.5 * m2 / s.rho[i] : 0.0;
    fre[i] = p.law.free_energy(s.rho[i]);
  }
  return {integrate(kin), integrate(fre),
          interaction_energy(p.kernel, s.rho, p.kappa)};
}

/// Viscous dissipation rate: integral of mu |grad u|^2 + (lambda+mu) (div u)^2.
inline double dissipation_rate(const State& s, const PhysParams& p,
                               double eps_vac) {
  VectorField u = velocity(s, eps_vac);
  const Grid& g = u.grid();
  ScalarField dens(g, 0.0);
  for (int c = 0; c < g.dim(); ++c) {
    ScalarField comp(g, 0.0);
    std::copy(u.component(c).begin(), u.component(c).end(),
              comp.values().begin());
    VectorField gc = gradient(comp);
    for (int d = 0; d < g.dim(); ++d) {
      auto gcd = gc.component(d);
      for (std::size_t i = 0; i < dens.size(); ++i)
        dens[i] += p.mu * gcd[i] * gcd[i];
    }
  }
  ScalarField div_u = divergence(u);
  const double lam_mu = p.lambda + p.mu;
  for (std::size_t i = 0; i < dens.size(); ++i)
    dens[i] += lam_mu * div_u[i] * div_u[i];
  return integrate(dens);
}

/// Effective viscous flux P(rho) + (kappa/2) rho^2 - (2 mu + lambda) div u.
inline ScalarField effective_flux(const State& s, const PhysParams& p,
                                  double eps_vac) {
  ScalarField div_u = divergence(velocity(s, eps_vac));
  ScalarField out(s.rho.grid());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = p.law.pressure(s.rho[i]) + 0.5 * p.kappa * s.rho[i] * s.rho[i] -
             (2.0 * p.mu + p.lambda) * div_u[i];
  return out;
}

/// Total variation of a field (sum of absolute neighbor differences times
/// h^(dim-1)); reported for effective-flux oscillation studies.
inline double total_variation(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  double tv = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i)
      tv += std::abs(f[g.wrap(i + 1)] - f[i]);
    return tv;
  }
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      double v = f.at(ix, iy);
      tv += std::abs(f.at(g.wrap(ix + 1), iy) - v) +
            std::abs(f.at(ix, g.wrap(iy + 1)) - v);
    }
  return tv * g.h();
}

// ---------------------------------------------------------------------------
// concave cut-off T_k and truncated rho log rho cut-off L_k

namespace detail {

// C2 concave bridge on [1, 3]: value/slope/curvature match z at 1 and the
// constant 2 at 3. T(z) = 1 + t - t^3/4 + t^4/16 with t = z - 1.
inline double cutoff_t_unit(double z) {
  if (z <= 1.0) return z;
  if (z >= 3.0) return 2.0;
  double t = z - 1.0;
  return 1.0 + t - t * t * t * 0.25 + t * t * t * t * 0.0625;
}

inline double cutoff_t_unit_prime(double z) {
  if (z <= 1.0) return 1.0;
  if (z >= 3.0) return 0.0;
  double t = z - 1.0;
  return 1.0 - 0.75 * t * t + 0.25 * t * t * t;
}

}  // namespace detail

/// T_k(z) = k T(z/k): identity below k, constant 2k above 3k, concave C2
/// in between. The below/above branches return exactly z and 2k.
inline double cutoff_tk(double z, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("cutoff_tk: k must be >= 1");
  if (!(z >= 0.0)) throw std::invalid_argument("cutoff_tk: z must be >= 0");
  if (z <= k) return z;
  if (z >= 3.0 * k) return 2.0 * k;
  return k * detail::cutoff_t_unit(z / k);
}

inline double cutoff_tk_prime(double z, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("cutoff_tk: k must be >= 1");
  if (z <= k) return 1.0;
  if (z >= 3.0 * k) return 0.0;
  return detail::cutoff_t_unit_prime(z / k);
}

/// L_k(rho) = rho log rho for rho <= k, extended linearly (matching value
/// and slope at k) beyond; the tangent line stays within [0, rho log rho]
/// for rho >= e.
inline double cutoff_lk(double rho, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("cutoff_lk: k must be >= 1");
  if (!(rho >= 0.0)) throw std::invalid_argument("cutoff_lk: rho must be >= 0");
  if (rho == 0.0) return 0.0;
  if (rho <= k) return rho * std::log(rho);
  return k * std::log(k) + (std::log(k) + 1.0) * (rho - k);
}

// ---------------------------------------------------------------------------
// renormalization functions b and the transport residual

/// Admissible renormalization function b(rho) with its transport defect
/// rho b'(rho) - b(rho) evaluated analytically per choice.
class BFunction {
 public:
  /// b(rho) = rho; the renormalized equation reduces to mass conservation.
  static BFunction identity() {
    BFunction b;
    b.kind_ = Kind::identity;
    return b;
  }

  /// b(rho) = rho^eps with 0 < eps < 1. Checks the growth window against
  /// s = max(2, gamma): the slope exponent eps - 1 must lie in (-1, s/2 - 1),
  /// which every eps in (0, 1) satisfies for s >= 2.
  static BFunction power(double eps, double s_growth = 2.0) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("BFunction: power exponent must be in (0,1)");
    if (!(s_growth >= 2.0))
      throw std::invalid_argument("BFunction: growth index s must be >= 2");
    if (!(eps - 1.0 < s_growth / 2.0 - 1.0))
      throw std::invalid_argument(
          "BFunction: exponent violates the growth window at infinity");
    BFunction b;
    b.kind_ = Kind::power;
    b.param_ = eps;
    return b;
  }

  static BFunction concave_cutoff(double k) {
    BFunction b;
    b.kind_ = Kind::cutoff_t;
    b.param_ = k;
    cutoff_tk(0.0, k);  // validates k
    return b;
  }

  static BFunction log_cutoff(double k) {
    BFunction b;
    b.kind_ = Kind::cutoff_l;
    b.param_ = k;
    cutoff_lk(0.0, k);
    return b;
  }

  double b(double rho) const {
    switch (kind_) {
      case Kind::identity:
        return rho;
      case Kind::power:
        return std::pow(rho, param_);
      case Kind::cutoff_t:
        return cutoff_tk(rho, param_);
      case Kind::cutoff_l:
        return cutoff_lk(rho, param_);
    }
    return 0.0;
  }

  /// rho b'(rho) - b(rho).
  double defect(double rho) const {
    switch (kind_) {
      case Kind::identity:
        return 0.0;
      case Kind::power:
        return (param_ - 1.0) * std::pow(rho, param_);
      case Kind::cutoff_t:
        return rho * cutoff_tk_prime(rho, param_) - cutoff_tk(rho, param_);
      case Kind::cutoff_l:
        // rho (log rho + 1) - rho log rho = rho below k, constant k above
        return std::min(rho, param_);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::identity:
        return "identity";
      case Kind::power:
        return "power:" + std::to_string(param_);
      case Kind::cutoff_t:
        return "tk:" + std::to_string(param_);
      case Kind::cutoff_l:
        return "lk:" + std::to_string(param_);
    }
    return "?";
  }

 private:
  enum class Kind { identity, power, cutoff_t, cutoff_l };
  Kind kind_ = Kind::identity;
  double param_ = 0.0;
};

/// (rho, u) sample of a trajectory at one instant.
struct Snapshot {
  double t;
  ScalarField rho;
  VectorField u;
};

inline Snapshot to_snapshot(const State& s, double eps_vac) {
  return {s.t, s.rho, velocity(s, eps_vac)};
}

/// L2 norm of the discrete residual of
///   d/dt b(rho) + div(b(rho) u) + (rho b'(rho) - b(rho)) div u = 0
/// at the middle snapshot, with a centered time difference. Requires three
/// snapshots with uniform spacing in t on one grid.
inline double renorm_residual(const Snapshot& s0, const Snapshot& s1,
                              const Snapshot& s2, const BFunction& bf) {
  const Grid& g = s1.rho.grid();
  if (s0.rho.grid() != g || s2.rho.grid() != g)
    throw std::invalid_argument("renorm_residual: snapshot grid mismatch");
  double dt1 = s1.t - s0.t, dt2 = s2.t - s1.t;
  if (!(dt1 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * dt1)
    throw std::invalid_argument("renorm_residual: snapshots not uniform in t");

  ScalarField b0(g), b1(g), b2(g);
  for (std::size_t i = 0; i < b1.size(); ++i) {
    b0[i] = bf.b(s0.rho[i]);
    b1[i] = bf.b(s1.rho[i]);
    b2[i] = bf.b(s2.rho[i]);
  }
  VectorField bu(g);
  for (int c = 0; c < g.dim(); ++c) {
    auto uc = s1.u.component(c);
    auto bc = bu.component(c);
    for (std::size_t i = 0; i < bc.size(); ++i) bc[i] = b1[i] * uc[i];
  }
  ScalarField div_bu = divergence(bu);
  ScalarField div_u = divergence(s1.u);
  ScalarField res(g);
  const double inv2dt = 1.0 / (dt1 + dt2);
  for (std::size_t i = 0; i < res.size(); ++i)
    res[i] = (b2[i] - b0[i]) * inv2dt + div_bu[i] +
             bf.defect(s1.rho[i]) * div_u[i];
  return lp_norm(res, 2.0);
}

/// Residual of the plain mass equation on the same stencils; identical to
/// renorm_residual with the identity b.
inline double mass_residual(const Snapshot& s0, const Snapshot& s1,
                            const Snapshot& s2) {
  return renorm_residual(s0, s1, s2, BFunction::identity());
}

// ---------------------------------------------------------------------------
// integrability monitor

/// Accumulates integral dt * (rho^(gamma+eps) + rho^(2+eps)) over a run and
/// reports its ratio to elapsed time. The exponent window follows the
/// formal dimension: 0 < eps <= 4/N - 1 for N in {2, 3}.
class IntegrabilityMonitor {
 public:
  IntegrabilityMonitor(double gamma, double eps, int n_formal)
      : gamma_(gamma), eps_(eps) {
    if (n_formal != 2 && n_formal != 3)
      throw std::invalid_argument("integrability monitor: N_formal must be 2 or 3");
    // (4 - N) / N rounds to the representable boundary (1/3 for N = 3)
    double eps_max = (4.0 - n_formal) / n_formal;
    if (!(eps > 0.0 && eps <= eps_max))
      throw std::invalid_argument(
          "integrability monitor: eps violates 0 < eps <= 4/N - 1 (N = " +
          std::to_string(n_formal) + " gives eps <= " +
          std::to_string(eps_max) + ")");
    if (!(gamma >= 1.0))
      throw std::invalid_argument("integrability monitor: gamma must be >= 1");
  }

  void accumulate(double dt, const ScalarField& rho) {
    ScalarField f(rho.grid());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = std::pow(rho[i], gamma_ + eps_) + std::pow(rho[i], 2.0 + eps_);
    accum_ += dt * integrate(f);
    elapsed_ += dt;
  }

  double value() const { return accum_; }
  double rate() const { return elapsed_ > 0.0 ? accum_ / elapsed_ : 0.0; }
  double eps() const { return eps_; }
  double gamma() const { return gamma_; }

 private:
  double gamma_, eps_;
  double accum_ = 0.0;
  double elapsed_ = 0.0;
};

// ---------------------------------------------------------------------------
// equilibrium functionals

struct EquilibriumEnergies {
  double kinetic = 0.0;
  double free = 0.0;      // (a/(gamma-1)) integral of j_gamma(rho)
  double nonlocal = 0.0;  // interaction energy of rho - rho_bar
  double total() const { return kinetic + free + nonlocal; }
};

/// Relative (equilibrium) energy around the constant state (rho_bar, 0):
/// kinetic + (a/(gamma-1)) integral j_gamma + E_global[rho - rho_bar].
/// gamma = 1 requires the log-form extension flag; the free part becomes
/// a * integral (rho log(rho/rho_bar) - (rho - rho_bar)).
inline EquilibriumEnergies equilibrium_energy(const State& s,
                                              const PhysParams& p,
                                              double eps_vac, double rho_bar,
                                              double gamma, double a,
                                              bool gamma1_extension = false) {
  if (!(rho_bar > 0.0))
    throw std::invalid_argument("equilibrium_energy: rho_bar must be > 0");
  if (gamma == 1.0 && !gamma1_extension)
    throw std::invalid_argument(
        "equilibrium_energy: gamma = 1 requires the log-form extension flag");
  const Grid& g = s.rho.grid();
  EquilibriumEnergies e;
  ScalarField kin(g), fre(g);
  for (std::size_t i = 0; i < kin.size(); ++i) {
    double m2 = 0.0;
    for (int c = 0; c < g.dim(); ++c) m2 += s.m.comp(c, i) * s.m.comp(c, i);
    kin[i] = s.rho[i] > eps_vac ? 0.5 * m2 / s.rho[i] : 0.0;
    if (gamma == 1.0) {
      double r = s.rho[i];
      fre[i] = a * (r > 0.0 ? r * std::log(r / rho_bar) - (r - rho_bar)
                            : rho_bar);
    } else {
      fre[i] = a / (gamma - 1.0) * j_gamma(s.rho[i], rho_bar, gamma);
    }
  }
  e.kinetic = integrate(kin);
  e.free = integrate(fre);
  e.nonlocal = interaction_energy(p.kernel, s.rho - rho_bar, p.kappa);
  return e;
}

/// Orlicz norm of the perturbation rho - rho_bar in the space that is
/// 2-integrable where small and max(gamma, 2)-integrable where large.
/// Reported next to integral j_gamma so the equivalence of the two is
/// observable on scenario families.
inline double orlicz_perturbation_norm(const State& s, double rho_bar,
                                       double gamma) {
  return orlicz_norm(s.rho - rho_bar, 2.0, std::max(gamma, 2.0), 1.0);
}

// ---------------------------------------------------------------------------
// ledger

struct LedgerRecord {
  double t = 0.0;
  double mass = 0.0;
  double mom[2] = {0.0, 0.0};
  double kinetic = 0.0, free = 0.0, nonlocal = 0.0;
  double dissipation_cum = 0.0;
  double vacuum_cum = 0.0;
  // optional columns; present iff the matching ledger flag is set
  double eq_kinetic = 0.0, eq_free = 0.0, eq_nonlocal = 0.0;
  double integ_accum = 0.0, integ_rate = 0.0;
  double renorm = 0.0;
  double orlicz_pert = 0.0, jgamma_int = 0.0;
};

/// Per-step energy and conservation bookkeeping for a run. Records must be
/// appended with strictly increasing t; the energy columns of a valid run
/// stay nonnegative.
class EnergyLedger {
 public:
  EnergyLedger(int dim, bool with_equilibrium, bool with_integrability,
               bool with_renorm, bool with_orlicz)
      : dim_(dim),
        with_eq_(with_equilibrium),
        with_integ_(with_integrability),
        with_renorm_(with_renorm),
        with_orlicz_(with_orlicz) {}

  void append(const LedgerRecord& r) {
    if (!records_.empty() && !(r.t > records_.back().t))
      throw std::invalid_argument("ledger: records must increase in t");
    records_.push_back(r);
  }

  const std::vector<LedgerRecord>& records() const { return records_; }
  bool with_equilibrium() const { return with_eq_; }
  bool with_integrability() const { return with_integ_; }
  bool with_renorm() const { return with_renorm_; }
  bool with_orlicz() const { return with_orlicz_; }

  void write_csv(std::ostream& os) const {
    os << "t,mass,mom_x";
    if (dim_ == 2) os << ",mom_y";
    os << ",kinetic,free,nonlocal,dissipation_cum,vacuum_cum";
    if (with_eq_) os << ",eq_kinetic,eq_free,eq_nonlocal";
    if (with_integ_) os << ",integ_accum,integ_rate";
    if (with_renorm_) os << ",renorm_residual";
    if (with_orlicz_) os << ",orlicz_pert,jgamma_int";
    os << '\n';
    char buf[64];
    auto put = [&](double v, char sep) {
      std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
      os << buf;
    };
    for (const auto& r : records_) {
      put(r.t, ','), put(r.mass, ','), put(r.mom[0], ',');
      if (dim_ == 2) put(r.mom[1], ',');
      put(r.kinetic, ','), put(r.free, ','), put(r.nonlocal, ',');
      put(r.dissipation_cum, ',');
      put(r.vacuum_cum, last_sep(0));
      if (with_eq_) {
        put(r.eq_kinetic, ','), put(r.eq_free, ',');
        put(r.eq_nonlocal, last_sep(1));
      }
      if (with_integ_) {
        put(r.integ_accum, ',');
        put(r.integ_rate, last_sep(2));
      }
      if (with_renorm_) put(r.renorm, last_sep(3));
      if (with_orlicz_) {
        put(r.orlicz_pert, ',');
        put(r.jgamma_int, '\n');
      }
    }
  }

 private:
  // separator after the last column of each optional group
  char last_sep(int group) const {
    bool more = (group < 1 && with_eq_) || (group < 2 && with_integ_) ||
                (group < 3 && with_renorm_) || (group < 4 && with_orlicz_);
    return more ? ',' : '\n';
  }

  int dim_;
  bool with_eq_, with_integ_, with_renorm_, with_orlicz_;
  std::vector<LedgerRecord> records_;
};

}  // namespace nsk
