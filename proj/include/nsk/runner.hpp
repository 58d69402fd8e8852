#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "nsk/config.hpp"
#include "nsk/diagnostics.hpp"
#include "nsk/field_io.hpp"

namespace nsk {

struct RunResult {
  EnergyLedger ledger;
  State final_state;
  long steps = 0;
  double eps_vac = 0.0;
  std::string output_dir;
};

namespace detail {

inline std::filesystem::path resolve_output_dir(const std::string& dir) {
  const char* root = std::getenv("NSK_OUT_DIR");
  std::filesystem::path p = root ? std::filesystem::path(root) / dir
                                 : std::filesystem::path(dir);
  std::filesystem::create_directories(p);
  return p;
}

inline void emit_snapshot(const std::filesystem::path& dir, long step,
                          const State& s, const std::string& format) {
  auto base = dir / ("snap_" + std::to_string(step));
  if (format == "binary" || format == "both") {
    write_snapshot(base.string() + ".bin", s.rho);
    write_snapshot(base.string() + "_m.bin", s.m);
  }
  if (format == "csv" || format == "both") {
    write_snapshot_csv(base.string() + ".csv", s.rho);
    write_snapshot_csv(base.string() + "_m.csv", s.m);
  }
}

}  // namespace detail

/// Advance a configured scenario to t_end, recording the ledger every
/// cadence steps (and at the final step) and emitting snapshots named
/// snap_<step>. Deterministic for a fixed config. On blow-up the last good
/// state is written as snap_abort_<step> before the error propagates.
/// The environment variable NSK_OUT_DIR overrides the output root.
inline RunResult run(const RunConfig& cfg) {
  const auto outdir = detail::resolve_output_dir(cfg.out.dir);

  State state = generate_initial(cfg.scenario, cfg.grid, cfg.phys.law,
                                 cfg.eps_vac);
  double eps_vac = cfg.eps_vac;
  if (eps_vac <= 0.0) {
    double peak = max_abs(state.rho);
    eps_vac = 1e-10 * (peak > 0.0 ? peak : 1.0);
  }

  EnergyLedger ledger(cfg.grid.dim(), cfg.diag.equilibrium,
                      cfg.diag.integrability, cfg.diag.renorm,
                      cfg.diag.orlicz);
  std::optional<IntegrabilityMonitor> monitor;
  if (cfg.diag.integrability)
    monitor.emplace(cfg.diag.gamma, cfg.diag.eps, cfg.diag.n_formal);
  BFunction bf = cfg.b_function();

  double diss_cum = 0.0, vac_cum = 0.0;
  double diss_prev = dissipation_rate(state, cfg.phys, eps_vac);

  // rolling window of the last three step states for the renorm column
  std::optional<Snapshot> prev1, prev2;

  auto record = [&](const State& s) {
    LedgerRecord r;
    r.t = s.t;
    r.mass = integrate(s.rho);
    for (int c = 0; c < cfg.grid.dim(); ++c) {
      ScalarField mc(cfg.grid, 0.0);
      std::copy(s.m.component(c).begin(), s.m.component(c).end(),
                mc.values().begin());
      r.mom[c] = integrate(mc);
    }
    Energies e = total_energy(s, cfg.phys, eps_vac);
    r.kinetic = e.kinetic;
    r.free = e.free;
    r.nonlocal = e.nonlocal;
    r.dissipation_cum = diss_cum;
    r.vacuum_cum = vac_cum;
    if (cfg.diag.equilibrium) {
      EquilibriumEnergies q =
          equilibrium_energy(s, cfg.phys, eps_vac, cfg.diag.rho_bar,
                             cfg.diag.gamma, cfg.diag.a,
                             cfg.diag.gamma1_extension);
      r.eq_kinetic = q.kinetic;
      r.eq_free = q.free;
      r.eq_nonlocal = q.nonlocal;
    }
    if (monitor) {
      r.integ_accum = monitor->value();
      r.integ_rate = monitor->rate();
    }
    if (cfg.diag.renorm) {
      r.renorm = std::numeric_limits<double>::quiet_NaN();
      if (prev1 && prev2) {
        Snapshot cur = to_snapshot(s, eps_vac);
        double d1 = prev1->t - prev2->t, d2 = cur.t - prev1->t;
        if (d1 > 0.0 && std::abs(d1 - d2) <= 1e-9 * d1)
          r.renorm = renorm_residual(*prev2, *prev1, cur, bf);
      }
    }
    if (cfg.diag.orlicz) {
      r.orlicz_pert =
          orlicz_perturbation_norm(s, cfg.diag.rho_bar, cfg.diag.gamma);
      ScalarField jg(cfg.grid);
      for (std::size_t i = 0; i < jg.size(); ++i)
        jg[i] = j_gamma(s.rho[i], cfg.diag.rho_bar,
                        std::max(cfg.diag.gamma, 1.0));
      r.jgamma_int = integrate(jg);
    }
    ledger.append(r);
  };

  auto flush = [&](long steps_done) {
    std::ofstream os(outdir / "ledger.csv");
    ledger.write_csv(os);
    (void)steps_done;
  };

  std::ofstream tv_report;
  auto emit_effective_flux = [&](long step_no, const State& s) {
    if (!cfg.diag.effective_flux) return;
    ScalarField eff = effective_flux(s, cfg.phys, eps_vac);
    write_snapshot(
        (outdir / ("eff_flux_" + std::to_string(step_no) + ".bin")).string(),
        eff);
    ScalarField pf(cfg.grid);
    for (std::size_t i = 0; i < pf.size(); ++i)
      pf[i] = cfg.phys.law.pressure(s.rho[i]);
    if (!tv_report.is_open()) {
      tv_report.open(outdir / "eff_flux_tv.csv");
      tv_report << "t,tv_eff,tv_pressure\n";
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t,
                  total_variation(eff), total_variation(pf));
    tv_report << buf;
  };

  long step_no = 0;
  record(state);
  if (cfg.out.snapshots) {
    detail::emit_snapshot(outdir, 0, state, cfg.out.snapshot_format);
    // kernel samples in the field format, for inspection
    write_snapshot((outdir / "kernel.bin").string(),
                   ScalarField(cfg.grid, cfg.phys.kernel.samples()));
  }
  emit_effective_flux(0, state);

  const double t_eps = 1e-14 * std::max(cfg.t_end, 1.0);
  try {
    while (state.t < cfg.t_end - t_eps) {
      double dt = cfl_dt(state, cfg.phys, cfg.c_cfl, eps_vac);
      if (cfg.dt_fixed > 0.0) dt = std::min(dt, cfg.dt_fixed);
      dt = std::min(dt, cfg.t_end - state.t);
      if (!(dt > 0.0)) throw std::runtime_error("run: nonpositive step size");

      if (monitor) monitor->accumulate(dt, state.rho);
      prev2 = prev1;
      prev1 = cfg.diag.renorm ? std::optional<Snapshot>(
                                    to_snapshot(state, eps_vac))
                              : std::nullopt;

      StepResult sr = step(state, cfg.phys, dt, eps_vac);
      vac_cum += sr.vacuum_correction;
      double diss_new = dissipation_rate(sr.state, cfg.phys, eps_vac);
      diss_cum += 0.5 * dt * (diss_prev + diss_new);
      diss_prev = diss_new;
      state = std::move(sr.state);
      ++step_no;

      bool due = step_no % cfg.out.cadence == 0 ||
                 !(state.t < cfg.t_end - t_eps);
      if (due) {
        record(state);
        if (cfg.out.snapshots)
          detail::emit_snapshot(outdir, step_no, state,
                                cfg.out.snapshot_format);
        emit_effective_flux(step_no, state);
      }
    }
  } catch (const BlowupError&) {
    detail::emit_snapshot(outdir, step_no, state, cfg.out.snapshot_format);
    auto abort_path = outdir / ("snap_abort_" + std::to_string(step_no));
    write_snapshot(abort_path.string() + ".bin", state.rho);
    flush(step_no);
    throw;
  }

  flush(step_no);
  return RunResult{std::move(ledger), std::move(state), step_no, eps_vac,
                   outdir.string()};
}

}  // namespace nsk
