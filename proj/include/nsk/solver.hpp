#pragma once

#include <limits>

#include "nsk/kernel.hpp"
#include "nsk/operators.hpp"
#include "nsk/pressure.hpp"

namespace nsk {

/// Conservative state (rho, m) at time t. Valid states have rho >= eps_vac
/// everywhere, m = 0 wherever rho sits on the vacuum floor, and finite values.
struct State {
  double t = 0.0;
  ScalarField rho;
  VectorField m;

  State(double time, ScalarField density, VectorField momentum)
      : t(time), rho(std::move(density)), m(std::move(momentum)) {
    if (rho.grid() != m.grid())
      throw std::invalid_argument("State: rho and m grids differ");
  }
};

/// Viscosities, capillarity coefficient, pressure law, capillarity kernel.
/// Enforces mu > 0 and lambda + 2 mu > 0, and kappa >= 0.
struct PhysParams {
  double mu;
  double lambda;
  double kappa;
  PressureLaw law;
  Kernel kernel;

  PhysParams(double mu_, double lambda_, double kappa_, PressureLaw law_,
             Kernel kernel_)
      : mu(mu_),
        lambda(lambda_),
        kappa(kappa_),
        law(std::move(law_)),
        kernel(std::move(kernel_)) {
    if (!(mu > 0.0 && lambda + 2.0 * mu > 0.0))
      throw std::invalid_argument(
          "PhysParams: requires mu > 0 and lambda + 2*mu > 0");
    if (!(kappa >= 0.0))
      throw std::invalid_argument("PhysParams: requires kappa >= 0");
  }
};

/// Raised when a non-finite value appears during time stepping.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(std::size_t cell, double time)
      : std::runtime_error("solver blow-up: non-finite value at cell " +
                           std::to_string(cell) + ", t = " +
                           std::to_string(time)),
        cell(cell),
        time(time) {}
  std::size_t cell;
  double time;
};

/// u = m / rho where rho >= eps_vac, u = 0 elsewhere.
inline VectorField velocity(const State& s, double eps_vac) {
  VectorField u(s.rho.grid());
  for (int c = 0; c < u.ncomp(); ++c) {
    auto mc = s.m.component(c);
    auto uc = u.component(c);
    for (std::size_t i = 0; i < uc.size(); ++i)
      uc[i] = s.rho[i] >= eps_vac ? mc[i] / s.rho[i] : 0.0;
  }
  return u;
}

struct RhsResult {
  ScalarField drho;
  VectorField dm;
};

namespace detail {

// Monotonized-central slope (undivided differences).
inline double mc_slope(double wm, double w0, double wp) {
  double dm = w0 - wm, dp = wp - w0;
  if (dm * dp <= 0.0) return 0.0;
  double central = 0.5 * (wp - wm);
  double lim = 2.0 * std::min(std::abs(dm), std::abs(dp));
  double mag = std::min(std::abs(central), lim);
  return central > 0.0 ? mag : -mag;
}

inline double wave_speed(const PressureLaw& law, double rho, double kappa) {
  return std::sqrt(std::max(law.dpressure(rho), 0.0) + kappa * rho);
}

}  // namespace detail

/// Semi-discrete right-hand side of the conservative system:
///   d(rho)/dt = -div(m)
///   d(m)/dt   = -div(m (x) u) - grad P(rho) + mu lap(u)
///               + (lambda+mu) grad(div u) + kappa rho grad(D[rho])
/// Convective terms use MC-reconstructed interface states with a local
/// Rusanov dissipation alpha = |u| + c applied to the (rho, m) jumps; the
/// flux form keeps the discrete mass and momentum totals telescoping.
inline RhsResult rhs(const State& s, const PhysParams& p, double eps_vac) {
  const Grid& g = s.rho.grid();
  p.kernel.require_same_grid(g);
  const int n = g.n();
  const int dim = g.dim();
  const double h = g.h();
  const std::size_t cells = g.cell_count();

  for (std::size_t i = 0; i < cells; ++i)
    if (!std::isfinite(s.rho[i])) throw BlowupError(i, s.t);
  for (int c = 0; c < dim; ++c)
    for (std::size_t i = 0; i < cells; ++i)
      if (!std::isfinite(s.m.comp(c, i))) throw BlowupError(i, s.t);

  VectorField u = velocity(s, eps_vac);
  RhsResult out{ScalarField(g, 0.0), VectorField(g, 0.0)};

  // conservative variables: w[0] = rho, w[1..dim] = m components
  const int nvar = 1 + dim;
  auto var = [&](int v) -> std::span<const double> {
    return v == 0 ? s.rho.values() : s.m.component(v - 1);
  };

  std::vector<std::vector<double>> slope(nvar, std::vector<double>(cells));
  std::vector<std::vector<double>> flux(nvar, std::vector<double>(cells));

  for (int axis = 0; axis < dim; ++axis) {
    auto neighbor = [&](std::size_t i, int off) -> std::size_t {
      if (dim == 1) return static_cast<std::size_t>(g.wrap(static_cast<int>(i) + off));
      int ix = static_cast<int>(i) / n, iy = static_cast<int>(i) % n;
      return axis == 0 ? g.index(g.wrap(ix + off), iy)
                       : g.index(ix, g.wrap(iy + off));
    };

    for (int v = 0; v < nvar; ++v) {
      auto w = var(v);
      for (std::size_t i = 0; i < cells; ++i)
        slope[v][i] =
            detail::mc_slope(w[neighbor(i, -1)], w[i], w[neighbor(i, +1)]);
    }

    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t j = neighbor(i, +1);
      double rhoL = s.rho[i] + 0.5 * slope[0][i];
      double rhoR = s.rho[j] - 0.5 * slope[0][j];
      double mL[2] = {0, 0}, mR[2] = {0, 0};
      for (int c = 0; c < dim; ++c) {
        mL[c] = s.m.comp(c, i) + 0.5 * slope[1 + c][i];
        mR[c] = s.m.comp(c, j) - 0.5 * slope[1 + c][j];
      }
      double uL = rhoL >= eps_vac ? mL[axis] / rhoL : 0.0;
      double uR = rhoR >= eps_vac ? mR[axis] / rhoR : 0.0;
      double alpha =
          std::max(std::abs(uL) + detail::wave_speed(p.law, std::max(rhoL, 0.0),
                                                     p.kappa),
                   std::abs(uR) + detail::wave_speed(p.law, std::max(rhoR, 0.0),
                                                     p.kappa));
      flux[0][i] = 0.5 * (mL[axis] + mR[axis]) - 0.5 * alpha * (rhoR - rhoL);
      for (int c = 0; c < dim; ++c)
        flux[1 + c][i] =
            0.5 * (mL[c] * uL + mR[c] * uR) - 0.5 * alpha * (mR[c] - mL[c]);
    }

    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t im = neighbor(i, -1);
      out.drho[i] -= (flux[0][i] - flux[0][im]) / h;
      for (int c = 0; c < dim; ++c)
        out.dm.comp(c, i) -= (flux[1 + c][i] - flux[1 + c][im]) / h;
    }
  }

  // pressure gradient
  ScalarField pf(g);
  for (std::size_t i = 0; i < cells; ++i) pf[i] = p.law.pressure(s.rho[i]);
  VectorField gp = gradient(pf);

  // viscous stress and nonlocal capillary force
  VectorField lap_u = laplacian_vector(u);
  VectorField gdiv_u = grad_div(u);
  VectorField cap = capillary_force(p.kernel, s.rho, p.kappa);

  const double lam_mu = p.lambda + p.mu;
  for (int c = 0; c < dim; ++c) {
    auto dmc = out.dm.component(c);
    auto gpc = gp.component(c);
    auto lc = lap_u.component(c);
    auto gd = gdiv_u.component(c);
    auto cc = cap.component(c);
    for (std::size_t i = 0; i < cells; ++i)
      dmc[i] += -gpc[i] + p.mu * lc[i] + lam_mu * gd[i] + cc[i];
  }

  for (std::size_t i = 0; i < cells; ++i)
    if (!std::isfinite(out.drho[i])) throw BlowupError(i, s.t);
  for (int c = 0; c < dim; ++c)
    for (std::size_t i = 0; i < cells; ++i)
      if (!std::isfinite(out.dm.comp(c, i))) throw BlowupError(i, s.t);

  return out;
}

/// CFL-limited step size:
/// c_cfl * min( h / (|u|_max + c_max), h^2 / (2 dim nu_max) ) with
/// c = sqrt(max(P', 0) + kappa rho) and nu_max = (2 mu + |lambda|) / rho_min,
/// rho_min floored at eps_vac.
inline double cfl_dt(const State& s, const PhysParams& p, double c_cfl,
                     double eps_vac) {
  if (!(c_cfl > 0.0 && c_cfl <= 1.0))
    throw std::invalid_argument("cfl_dt: c_cfl must be in (0, 1]");
  const Grid& g = s.rho.grid();
  VectorField u = velocity(s, eps_vac);
  double umax = max_abs(u);
  double cmax = 0.0;
  double rho_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    cmax = std::max(cmax, detail::wave_speed(p.law, s.rho[i], p.kappa));
    rho_min = std::min(rho_min, s.rho[i]);
  }
  double h = g.h();
  double dt_hyp = umax + cmax > 0.0 ? h / (umax + cmax)
                                    : std::numeric_limits<double>::infinity();
  double nu = (2.0 * p.mu + std::abs(p.lambda)) / std::max(rho_min, eps_vac);
  double dt_par = h * h / (2.0 * g.dim() * nu);
  return c_cfl * std::min(dt_hyp, dt_par);
}

struct StepResult {
  State state;
  double vacuum_correction;  // mass added by clamping, in integral units
};

namespace detail {

// Clamp rho to the vacuum floor and zero the momentum there. Returns the
// mass added, sum (eps_vac - rho) * h^dim over clamped cells.
inline double vacuum_project(State& s, double eps_vac) {
  double deficit = 0.0;
  const double vol = s.rho.grid().cell_volume();
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (s.rho[i] < eps_vac) {
      deficit += (eps_vac - s.rho[i]) * vol;
      s.rho[i] = eps_vac;
      for (int c = 0; c < s.m.ncomp(); ++c) s.m.comp(c, i) = 0.0;
    }
  }
  return deficit;
}

inline State axpy_state(const State& s, double dt, const RhsResult& k) {
  State r = s;
  for (std::size_t i = 0; i < r.rho.size(); ++i) r.rho[i] += dt * k.drho[i];
  for (std::size_t i = 0; i < r.m.size(); ++i)
    r.m.values()[i] += dt * k.dm.values()[i];
  return r;
}

}  // namespace detail

/// One explicit midpoint (RK2) step followed by the vacuum projection.
inline StepResult step(const State& s, const PhysParams& p, double dt,
                       double eps_vac) {
  RhsResult k1 = rhs(s, p, eps_vac);
  State mid = detail::axpy_state(s, 0.5 * dt, k1);
  mid.t = s.t + 0.5 * dt;
  detail::vacuum_project(mid, eps_vac);
  RhsResult k2 = rhs(mid, p, eps_vac);
  State out = detail::axpy_state(s, dt, k2);
  out.t = s.t + dt;
  double deficit = detail::vacuum_project(out, eps_vac);
  return {std::move(out), deficit};
}

}  // namespace nsk
