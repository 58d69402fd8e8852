#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <variant>

#include "nsk/diagnostics.hpp"
#include "nsk/solver.hpp"

// Run configuration: a flat UTF-8 key-value format with sections
// [grid] [physics] [pressure] [kernel] [scenario] [diagnostics] [output].
// Unknown keys are errors, and validation collects every violation before
// reporting, so a bad file lists all of its problems at once.

namespace nsk {

struct ScenarioEquilibrium {
  double rho_bar = 1.0;
};
struct ScenarioPerturbation {
  double rho_bar = 1.0;
  double amplitude = 0.01;
  int modes = 3;
  std::uint64_t seed = 1;
};
struct ScenarioTwoPhase {
  double rho_liquid = 0.0;
  double rho_vapor = 0.0;
  double width = 0.05;
  std::string geometry = "slab";  // slab | disk (disk is 2D only)
};
struct ScenarioVacuumPocket {
  double background = 1.0;
  double radius = 0.2;
};
struct ScenarioManufactured {
  std::string id = "translating_wave";  // translating_wave | acoustic_pulse
};

using ScenarioGenerator =
    std::variant<ScenarioEquilibrium, ScenarioPerturbation, ScenarioTwoPhase,
                 ScenarioVacuumPocket, ScenarioManufactured>;

struct ScenarioSpec {
  std::string name;
  ScenarioGenerator gen;
};

struct DiagnosticsConfig {
  bool equilibrium = false;
  bool integrability = false;
  bool renorm = false;
  bool orlicz = false;
  bool effective_flux = false;  // emit flux snapshots + oscillation report
  double rho_bar = 1.0;   // reference state for equilibrium functionals
  double gamma = 2.0;     // exponent for j_gamma and the monitor
  double a = 1.0;         // pressure coefficient in the equilibrium energy
  bool gamma1_extension = false;
  double eps = 0.25;      // integrability exponent
  int n_formal = 3;       // formal dimension for the exponent window
  std::string b_choice = "identity";  // identity | power:<eps> | tk:<k> | lk:<k>
};

struct OutputConfig {
  std::string dir = "out";
  int cadence = 10;  // steps between ledger records / snapshots
  bool snapshots = true;
  std::string snapshot_format = "binary";  // binary | csv | both
};

// Construction parameters as written in the config file, kept so that a
// parsed config can be dumped back verbatim.
struct PressureSpec {
  std::string type = "isentropic";
  double a = 1.0, gamma = 2.0;                     // isentropic
  double R = 1.0, T_star = 0.1, b = 1.0, theta = 0.1;  // vdw (a shared)
  std::vector<double> rho_knots, p_knots;          // table
};

struct KernelSpec {
  std::string type = "gaussian";
  double sigma = 0.02;
  double radius = 0.05;
};

struct RunConfig {
  Grid grid;
  PhysParams phys;
  PressureSpec pressure_spec;
  KernelSpec kernel_spec;
  ScenarioSpec scenario;
  double t_end = 1.0;
  double c_cfl = 0.9;
  double eps_vac = 0.0;   // 0: auto, 1e-10 * max(rho0)
  double dt_fixed = 0.0;  // 0: adaptive CFL; otherwise min(dt_fixed, cfl)
  DiagnosticsConfig diag;
  OutputConfig out;

  BFunction b_function() const;
};

/// Carries every validation failure found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& es) {
    std::string s = "config validation failed:";
    for (const auto& e : es) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

struct RawConfig {
  // section -> key -> value, with consumption tracking for unknown-key errors
  std::map<std::string, std::map<std::string, std::string>> kv;
  mutable std::set<std::pair<std::string, std::string>> consumed;

  std::optional<std::string> get(const std::string& sec,
                                 const std::string& key) const {
    auto s = kv.find(sec);
    if (s == kv.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    consumed.insert({sec, key});
    return k->second;
  }
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline RawConfig parse_raw(const std::string& text,
                           std::vector<std::string>& errors) {
  static const std::set<std::string> known_sections = {
      "grid", "physics", "pressure", "kernel",
      "scenario", "diagnostics", "output"};
  RawConfig raw;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) +
                         ": malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        errors.push_back("line " + std::to_string(lineno) +
                         ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) +
                       ": expected key = value, got '" + line + "'");
      continue;
    }
    if (section.empty()) {
      errors.push_back("line " + std::to_string(lineno) +
                       ": key outside any section");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (raw.kv[section].count(key))
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key [" +
                       section + "] " + key);
    raw.kv[section][key] = value;
  }
  return raw;
}

class Reader {
 public:
  Reader(const RawConfig& raw, std::vector<std::string>& errors)
      : raw_(raw), errors_(errors) {}

  double number(const std::string& sec, const std::string& key, double dflt) {
    auto v = raw_.get(sec, key);
    if (!v) return dflt;
    return parse_number(sec, key, *v).value_or(dflt);
  }

  std::optional<double> required_number(const std::string& sec,
                                        const std::string& key) {
    auto v = raw_.get(sec, key);
    if (!v) {
      errors_.push_back("[" + sec + "] missing required key '" + key + "'");
      return std::nullopt;
    }
    return parse_number(sec, key, *v);
  }

  long integer(const std::string& sec, const std::string& key, long dflt) {
    double d = number(sec, key, static_cast<double>(dflt));
    auto l = static_cast<long>(d);
    if (static_cast<double>(l) != d) {
      errors_.push_back("[" + sec + "] " + key + " must be an integer");
      return dflt;
    }
    return l;
  }

  bool flag(const std::string& sec, const std::string& key, bool dflt) {
    auto v = raw_.get(sec, key);
    if (!v) return dflt;
    if (*v == "true" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "off" || *v == "0") return false;
    errors_.push_back("[" + sec + "] " + key + " must be a boolean, got '" +
                      *v + "'");
    return dflt;
  }

  std::string text(const std::string& sec, const std::string& key,
                   const std::string& dflt) {
    return raw_.get(sec, key).value_or(dflt);
  }

  std::vector<double> number_list(const std::string& sec,
                                  const std::string& key) {
    auto v = raw_.get(sec, key);
    std::vector<double> out;
    if (!v) {
      errors_.push_back("[" + sec + "] missing required key '" + key + "'");
      return out;
    }
    std::istringstream is(*v);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      auto d = parse_number(sec, key, trim(tok));
      if (d) out.push_back(*d);
    }
    return out;
  }

  void fail(const std::string& msg) { errors_.push_back(msg); }

  void report_unknown_keys() {
    for (const auto& [sec, kv] : raw_.kv)
      for (const auto& [key, value] : kv)
        if (!raw_.consumed.count({sec, key}))
          errors_.push_back("unknown key [" + sec + "] " + key);
  }

 private:
  std::optional<double> parse_number(const std::string& sec,
                                     const std::string& key,
                                     const std::string& v) {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return d;
    } catch (const std::exception&) {
      errors_.push_back("[" + sec + "] " + key + " is not a number: '" + v +
                        "'");
      return std::nullopt;
    }
  }

  const RawConfig& raw_;
  std::vector<std::string>& errors_;
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline BFunction parse_b_choice(const std::string& spec, double gamma) {
  double s_growth = std::max(2.0, gamma);
  if (spec == "identity") return BFunction::identity();
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string kind = spec.substr(0, colon);
    double p = std::stod(spec.substr(colon + 1));
    if (kind == "power") return BFunction::power(p, s_growth);
    if (kind == "tk") return BFunction::concave_cutoff(p);
    if (kind == "lk") return BFunction::log_cutoff(p);
  }
  throw std::invalid_argument(
      "b must be identity, power:<eps>, tk:<k> or lk:<k>, got '" + spec + "'");
}

inline BFunction RunConfig::b_function() const {
  return parse_b_choice(diag.b_choice, diag.gamma);
}

/// Parses and fully validates a run configuration. Throws ConfigError with
/// the complete list of violations on failure.
inline RunConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  detail::RawConfig raw = detail::parse_raw(text, errors);
  detail::Reader r(raw, errors);

  // [grid]
  int dim = static_cast<int>(r.integer("grid", "dim", 1));
  int n = static_cast<int>(r.integer("grid", "n", 128));
  double L = r.number("grid", "L", 1.0);
  std::optional<Grid> grid;
  try {
    grid.emplace(dim, n, L);
  } catch (const std::exception& e) {
    r.fail(std::string("[grid] ") + e.what());
  }

  // [physics]
  double mu = r.number("physics", "mu", 1e-2);
  double lambda = r.number("physics", "lambda", 0.0);
  double kappa = r.number("physics", "kappa", 1.0);
  if (!(mu > 0.0 && lambda + 2.0 * mu > 0.0))
    r.fail("[physics] mu = " + detail::fmt(mu) + ", lambda = " +
           detail::fmt(lambda) + " violates: mu > 0 and lambda + 2*mu > 0");
  if (!(kappa >= 0.0))
    r.fail("[physics] kappa = " + detail::fmt(kappa) + " violates: kappa >= 0");

  // [pressure]
  PressureSpec pspec;
  pspec.type = r.text("pressure", "type", "isentropic");
  std::optional<PressureLaw> law;
  double law_gamma = 2.0;
  try {
    if (pspec.type == "isentropic") {
      pspec.a = r.number("pressure", "a", 1.0);
      pspec.gamma = r.number("pressure", "gamma", 2.0);
      law_gamma = pspec.gamma;
      law = PressureLaw::isentropic(pspec.a, pspec.gamma);
    } else if (pspec.type == "vdw") {
      pspec.R = r.number("pressure", "R", 1.0);
      pspec.T_star = r.number("pressure", "T_star", 0.1);
      pspec.a = r.number("pressure", "a", 1.0);
      pspec.b = r.number("pressure", "b", 1.0);
      pspec.theta = r.number("pressure", "theta", 0.1 * pspec.b);
      law = PressureLaw::van_der_waals(pspec.R, pspec.T_star, pspec.a, pspec.b,
                                       pspec.theta);
    } else if (pspec.type == "table") {
      pspec.rho_knots = r.number_list("pressure", "rho");
      pspec.p_knots = r.number_list("pressure", "P");
      law = PressureLaw::monotone_table(pspec.rho_knots, pspec.p_knots);
    } else {
      r.fail("[pressure] type must be isentropic, vdw or table, got '" +
             pspec.type + "'");
    }
  } catch (const std::exception& e) {
    r.fail(std::string("[pressure] ") + e.what());
  }

  // [kernel]
  KernelSpec kspec;
  kspec.type = r.text("kernel", "type", "gaussian");
  std::optional<Kernel> kernel;
  try {
    if (!grid) {
      // cannot build a kernel without a grid; the grid error is already listed
    } else if (kspec.type == "gaussian") {
      kspec.sigma = r.number("kernel", "sigma", 0.02 * L);
      kernel = Kernel::gaussian(*grid, kspec.sigma);
    } else if (kspec.type == "tent") {
      kspec.radius = r.number("kernel", "radius", 0.05 * L);
      kernel = Kernel::tent(*grid, kspec.radius);
    } else {
      r.fail("[kernel] type must be gaussian or tent, got '" + kspec.type +
             "'");
    }
  } catch (const std::exception& e) {
    r.fail(std::string("[kernel] ") + e.what());
  }

  // [scenario]
  ScenarioSpec scenario;
  std::string stype = r.text("scenario", "type", "equilibrium");
  scenario.name = r.text("scenario", "name", stype);
  double scen_rho_bar = 1.0;
  if (stype == "equilibrium") {
    ScenarioEquilibrium s;
    s.rho_bar = r.number("scenario", "rho_bar", 1.0);
    if (!(s.rho_bar > 0.0)) r.fail("[scenario] rho_bar must be > 0");
    scen_rho_bar = s.rho_bar;
    scenario.gen = s;
  } else if (stype == "perturbation") {
    ScenarioPerturbation s;
    s.rho_bar = r.number("scenario", "rho_bar", 1.0);
    s.amplitude = r.number("scenario", "amplitude", 0.01);
    s.modes = static_cast<int>(r.integer("scenario", "modes", 3));
    s.seed = static_cast<std::uint64_t>(r.integer("scenario", "seed", 1));
    if (!(s.rho_bar > 0.0)) r.fail("[scenario] rho_bar must be > 0");
    if (!(s.amplitude >= 0.0 && s.amplitude < s.rho_bar))
      r.fail("[scenario] amplitude = " + detail::fmt(s.amplitude) +
             " violates: 0 <= amplitude < rho_bar (initial density must stay "
             "nonnegative)");
    if (s.modes < 1) r.fail("[scenario] modes must be >= 1");
    scen_rho_bar = s.rho_bar;
    scenario.gen = s;
  } else if (stype == "two_phase") {
    ScenarioTwoPhase s;
    s.rho_liquid = r.number("scenario", "rho_liquid", 0.0);
    s.rho_vapor = r.number("scenario", "rho_vapor", 0.0);
    s.width = r.number("scenario", "width", 0.05);
    s.geometry = r.text("scenario", "geometry", "slab");
    if (!(s.rho_vapor > 0.0 && s.rho_liquid > s.rho_vapor))
      r.fail("[scenario] two_phase requires 0 < rho_vapor < rho_liquid");
    if (!(s.width > 0.0)) r.fail("[scenario] width must be > 0");
    if (s.geometry != "slab" && s.geometry != "disk")
      r.fail("[scenario] geometry must be slab or disk");
    if (s.geometry == "disk" && dim != 2)
      r.fail("[scenario] disk geometry requires dim = 2");
    if (law && law->family() == PressureFamily::van_der_waals) {
      // both phases must sit outside the spinodal window where P' < 0
      auto info = law->vdw_info();
      double lo = -1.0, hi = -1.0;
      const int ns = 20000;
      for (int i = 0; i <= ns; ++i) {
        double rho = info.rho_lin * i / ns;
        if (law->dpressure(rho) < 0.0) {
          if (lo < 0.0) lo = rho;
          hi = rho;
        }
      }
      if (lo < 0.0) {
        r.fail("[scenario] two_phase requires a non-monotone law: P' >= 0 "
               "everywhere, no spinodal window to separate");
      } else {
        if (!(s.rho_vapor < lo) || law->dpressure(s.rho_vapor) <= 0.0)
          r.fail("[scenario] rho_vapor = " + detail::fmt(s.rho_vapor) +
                 " must lie below the spinodal window [" + detail::fmt(lo) +
                 ", " + detail::fmt(hi) + "] with P'(rho_vapor) > 0");
        if (!(s.rho_liquid > hi) || law->dpressure(s.rho_liquid) <= 0.0)
          r.fail("[scenario] rho_liquid = " + detail::fmt(s.rho_liquid) +
                 " must lie above the spinodal window [" + detail::fmt(lo) +
                 ", " + detail::fmt(hi) + "] with P'(rho_liquid) > 0");
      }
    } else if (law) {
      r.fail("[scenario] two_phase requires a non-monotone (vdw) law: no "
             "spinodal to separate");
    }
    scen_rho_bar = 0.5 * (s.rho_liquid + s.rho_vapor);
    scenario.gen = s;
  } else if (stype == "vacuum_pocket") {
    ScenarioVacuumPocket s;
    s.background = r.number("scenario", "background", 1.0);
    s.radius = r.number("scenario", "radius", 0.2);
    if (!(s.background > 0.0)) r.fail("[scenario] background must be > 0");
    if (!(s.radius > 0.0 && (!grid || s.radius < L / 2)))
      r.fail("[scenario] radius must be in (0, L/2)");
    scen_rho_bar = s.background;
    scenario.gen = s;
  } else if (stype == "manufactured") {
    ScenarioManufactured s;
    s.id = r.text("scenario", "id", "translating_wave");
    if (s.id != "translating_wave" && s.id != "acoustic_pulse")
      r.fail("[scenario] manufactured id must be translating_wave or "
             "acoustic_pulse, got '" + s.id + "'");
    if (dim != 1) r.fail("[scenario] manufactured scenarios are 1D");
    scenario.gen = s;
  } else {
    r.fail("[scenario] type '" + stype + "' is not a scenario");
  }

  double t_end = r.number("scenario", "t_end", 1.0);
  if (!(t_end >= 0.0)) r.fail("[scenario] t_end must be >= 0");
  double c_cfl = r.number("scenario", "cfl", 0.9);
  if (!(c_cfl > 0.0 && c_cfl <= 1.0))
    r.fail("[scenario] cfl = " + detail::fmt(c_cfl) +
           " violates: 0 < c_cfl <= 1");
  double eps_vac = r.number("scenario", "eps_vac", 0.0);
  if (!(eps_vac >= 0.0)) r.fail("[scenario] eps_vac must be >= 0");
  double dt_fixed = r.number("scenario", "dt", 0.0);
  if (!(dt_fixed >= 0.0)) r.fail("[scenario] dt must be >= 0");

  // [diagnostics]
  DiagnosticsConfig diag;
  diag.equilibrium = r.flag("diagnostics", "equilibrium", false);
  diag.integrability = r.flag("diagnostics", "integrability", false);
  diag.renorm = r.flag("diagnostics", "renorm", false);
  diag.orlicz = r.flag("diagnostics", "orlicz", false);
  diag.effective_flux = r.flag("diagnostics", "effective_flux", false);
  diag.rho_bar = r.number("diagnostics", "rho_bar", scen_rho_bar);
  diag.gamma = r.number("diagnostics", "gamma", law_gamma);
  diag.a = r.number("diagnostics", "a", 1.0);
  diag.gamma1_extension = r.flag("diagnostics", "gamma1_extension", false);
  diag.eps = r.number("diagnostics", "eps", 0.25);
  diag.n_formal = static_cast<int>(r.integer("diagnostics", "n_formal", 3));
  diag.b_choice = r.text("diagnostics", "b", "identity");
  if (diag.integrability) {
    try {
      IntegrabilityMonitor probe(diag.gamma, diag.eps, diag.n_formal);
    } catch (const std::exception& e) {
      r.fail(std::string("[diagnostics] ") + e.what());
    }
  }
  if (diag.equilibrium) {
    if (!(diag.rho_bar > 0.0)) r.fail("[diagnostics] rho_bar must be > 0");
    if (diag.gamma == 1.0 && !diag.gamma1_extension)
      r.fail("[diagnostics] gamma = 1 equilibrium energy requires "
             "gamma1_extension = true");
  }
  try {
    parse_b_choice(diag.b_choice, diag.gamma);
  } catch (const std::exception& e) {
    r.fail(std::string("[diagnostics] ") + e.what());
  }

  // [output]
  OutputConfig out;
  out.dir = r.text("output", "dir", "out");
  out.cadence = static_cast<int>(r.integer("output", "cadence", 10));
  if (out.cadence < 1) r.fail("[output] cadence must be >= 1");
  out.snapshots = r.flag("output", "snapshots", true);
  out.snapshot_format = r.text("output", "snapshot_format", "binary");
  if (out.snapshot_format != "binary" && out.snapshot_format != "csv" &&
      out.snapshot_format != "both")
    r.fail("[output] snapshot_format must be binary, csv or both");

  r.report_unknown_keys();
  if (!errors.empty()) throw ConfigError(std::move(errors));

  RunConfig cfg{*grid,
                PhysParams(mu, lambda, kappa, std::move(*law),
                           std::move(*kernel)),
                std::move(pspec),
                std::move(kspec),
                std::move(scenario),
                t_end,
                c_cfl,
                eps_vac,
                dt_fixed,
                diag,
                out};
  return cfg;
}

/// Canonical text form; parse(dump(parse(x))) is structurally equal to
/// parse(x).
inline std::string dump_config(const RunConfig& cfg) {
  using detail::fmt;
  std::ostringstream os;
  os << "[grid]\n"
     << "dim = " << cfg.grid.dim() << "\nn = " << cfg.grid.n()
     << "\nL = " << fmt(cfg.grid.extent()) << "\n\n";
  os << "[physics]\nmu = " << fmt(cfg.phys.mu)
     << "\nlambda = " << fmt(cfg.phys.lambda)
     << "\nkappa = " << fmt(cfg.phys.kappa) << "\n\n";
  os << "[pressure]\ntype = " << cfg.pressure_spec.type << "\n";
  if (cfg.pressure_spec.type == "isentropic") {
    os << "a = " << fmt(cfg.pressure_spec.a)
       << "\ngamma = " << fmt(cfg.pressure_spec.gamma) << "\n\n";
  } else if (cfg.pressure_spec.type == "vdw") {
    os << "R = " << fmt(cfg.pressure_spec.R)
       << "\nT_star = " << fmt(cfg.pressure_spec.T_star)
       << "\na = " << fmt(cfg.pressure_spec.a)
       << "\nb = " << fmt(cfg.pressure_spec.b)
       << "\ntheta = " << fmt(cfg.pressure_spec.theta) << "\n\n";
  } else {
    auto list = [&](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + fmt(v[i]);
      return s;
    };
    os << "rho = " << list(cfg.pressure_spec.rho_knots)
       << "\nP = " << list(cfg.pressure_spec.p_knots) << "\n\n";
  }
  os << "[kernel]\ntype = " << cfg.kernel_spec.type << "\n";
  if (cfg.kernel_spec.type == "gaussian")
    os << "sigma = " << fmt(cfg.kernel_spec.sigma) << "\n\n";
  else
    os << "radius = " << fmt(cfg.kernel_spec.radius) << "\n\n";
  os << "[scenario]\nname = " << cfg.scenario.name << "\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ScenarioEquilibrium>) {
          os << "type = equilibrium\nrho_bar = " << fmt(s.rho_bar) << "\n";
        } else if constexpr (std::is_same_v<T, ScenarioPerturbation>) {
          os << "type = perturbation\nrho_bar = " << fmt(s.rho_bar)
             << "\namplitude = " << fmt(s.amplitude)
             << "\nmodes = " << s.modes << "\nseed = " << s.seed << "\n";
        } else if constexpr (std::is_same_v<T, ScenarioTwoPhase>) {
          os << "type = two_phase\nrho_liquid = " << fmt(s.rho_liquid)
             << "\nrho_vapor = " << fmt(s.rho_vapor)
             << "\nwidth = " << fmt(s.width) << "\ngeometry = " << s.geometry
             << "\n";
        } else if constexpr (std::is_same_v<T, ScenarioVacuumPocket>) {
          os << "type = vacuum_pocket\nbackground = " << fmt(s.background)
             << "\nradius = " << fmt(s.radius) << "\n";
        } else {
          os << "type = manufactured\nid = " << s.id << "\n";
        }
      },
      cfg.scenario.gen);
  os << "t_end = " << fmt(cfg.t_end) << "\ncfl = " << fmt(cfg.c_cfl)
     << "\neps_vac = " << fmt(cfg.eps_vac) << "\ndt = " << fmt(cfg.dt_fixed)
     << "\n\n";
  const auto& d = cfg.diag;
  os << "[diagnostics]\nequilibrium = " << (d.equilibrium ? "true" : "false")
     << "\nintegrability = " << (d.integrability ? "true" : "false")
     << "\nrenorm = " << (d.renorm ? "true" : "false")
     << "\norlicz = " << (d.orlicz ? "true" : "false")
     << "\neffective_flux = " << (d.effective_flux ? "true" : "false")
     << "\nrho_bar = " << fmt(d.rho_bar) << "\ngamma = " << fmt(d.gamma)
     << "\na = " << fmt(d.a)
     << "\ngamma1_extension = " << (d.gamma1_extension ? "true" : "false")
     << "\neps = " << fmt(d.eps) << "\nn_formal = " << d.n_formal
     << "\nb = " << d.b_choice << "\n\n";
  os << "[output]\ndir = " << cfg.out.dir << "\ncadence = " << cfg.out.cadence
     << "\nsnapshots = " << (cfg.out.snapshots ? "true" : "false")
     << "\nsnapshot_format = " << cfg.out.snapshot_format << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// initial data generators

namespace detail {

// uniform double in [0, 1) from the raw engine stream; implementation-
// independent so runs are bit-identical across platforms
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Deterministic initial state for a scenario. Generated densities are
/// nonnegative and the momentum vanishes wherever the density sits below
/// the vacuum floor.
inline State generate_initial(const ScenarioSpec& spec, const Grid& grid,
                              const PressureLaw& law, double eps_vac) {
  ScalarField rho(grid, 0.0);
  VectorField m(grid, 0.0);
  const double L = grid.extent();
  const int n = grid.n();

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ScenarioEquilibrium>) {
          for (auto& v : rho.values()) v = s.rho_bar;
        } else if constexpr (std::is_same_v<T, ScenarioPerturbation>) {
          std::mt19937_64 eng(s.seed);
          struct Mode {
            int kx, ky;
            double w, phx, phy;
          };
          std::vector<Mode> modes;
          for (int j = 1; j <= s.modes; ++j) {
            Mode mo;
            mo.kx = j;
            mo.ky = 1 + static_cast<int>(detail::uniform01(eng) * s.modes);
            mo.w = 0.5 + 0.5 * detail::uniform01(eng);
            mo.phx = 2.0 * M_PI * detail::uniform01(eng);
            mo.phy = 2.0 * M_PI * detail::uniform01(eng);
            modes.push_back(mo);
          }
          double peak = 0.0;
          ScalarField pert(grid, 0.0);
          for (int ix = 0; ix < n; ++ix) {
            int niy = grid.dim() == 2 ? n : 1;
            for (int iy = 0; iy < niy; ++iy) {
              double v = 0.0;
              for (const auto& mo : modes) {
                double term = mo.w * std::cos(2.0 * M_PI * mo.kx *
                                                  grid.coord(ix) / L +
                                              mo.phx);
                if (grid.dim() == 2)
                  term *= std::cos(2.0 * M_PI * mo.ky * grid.coord(iy) / L +
                                   mo.phy);
                v += term;
              }
              pert[grid.index(ix, iy)] = v;
              peak = std::max(peak, std::abs(v));
            }
          }
          double scale = peak > 0.0 ? s.amplitude / peak : 0.0;
          for (std::size_t i = 0; i < rho.size(); ++i)
            rho[i] = s.rho_bar + scale * pert[i];
        } else if constexpr (std::is_same_v<T, ScenarioTwoPhase>) {
          if (grid.dim() == 1 || s.geometry == "slab") {
            for (int ix = 0; ix < n; ++ix) {
              double x = grid.coord(ix);
              double ramp =
                  0.5 * (std::tanh((x - 0.25 * L) / s.width) -
                         std::tanh((x - 0.75 * L) / s.width));
              double v = s.rho_vapor + (s.rho_liquid - s.rho_vapor) * ramp;
              int niy = grid.dim() == 2 ? n : 1;
              for (int iy = 0; iy < niy; ++iy) rho[grid.index(ix, iy)] = v;
            }
          } else {
            for (int ix = 0; ix < n; ++ix)
              for (int iy = 0; iy < n; ++iy) {
                double dx = grid.coord(ix) - 0.5 * L;
                double dy = grid.coord(iy) - 0.5 * L;
                double rr = std::hypot(dx, dy);
                double ramp = 0.5 * (1.0 - std::tanh((rr - 0.25 * L) / s.width));
                rho[grid.index(ix, iy)] =
                    s.rho_vapor + (s.rho_liquid - s.rho_vapor) * ramp;
              }
          }
        } else if constexpr (std::is_same_v<T, ScenarioVacuumPocket>) {
          const double w = 2.0 * grid.h();
          for (int ix = 0; ix < n; ++ix) {
            int niy = grid.dim() == 2 ? n : 1;
            for (int iy = 0; iy < niy; ++iy) {
              double dx = grid.coord(ix) - 0.5 * L;
              double r = grid.dim() == 2
                             ? std::hypot(dx, grid.coord(iy) - 0.5 * L)
                             : std::abs(dx);
              rho[grid.index(ix, iy)] =
                  s.background * 0.5 * (1.0 + std::tanh((r - s.radius) / w));
            }
          }
        } else {  // manufactured
          if (s.id == "translating_wave") {
            for (int ix = 0; ix < n; ++ix) {
              double x = grid.coord(ix);
              rho[ix] = 1.0 + 0.1 * std::sin(2.0 * M_PI * x / L);
              m.comp(0, ix) = rho[ix];  // u = 1
            }
          } else {  // acoustic_pulse: right-moving simple wave around rho = 1
            double c0 = std::sqrt(std::max(law.dpressure(1.0), 0.0));
            double width = L / 16.0;
            for (int ix = 0; ix < n; ++ix) {
              double x = grid.coord(ix) - 0.25 * L;
              double drho = 0.01 * std::exp(-x * x / (2.0 * width * width));
              rho[ix] = 1.0 + drho;
              m.comp(0, ix) = rho[ix] * (c0 * drho);
            }
          }
        }
      },
      spec.gen);

  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0))
      throw std::logic_error("generator produced a negative density");
    if (rho[i] < eps_vac)
      for (int c = 0; c < m.ncomp(); ++c) m.comp(c, i) = 0.0;
  }
  return State(0.0, std::move(rho), std::move(m));
}

}  // namespace nsk
