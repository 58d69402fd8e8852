// Command-line front end: validate configs, run scenarios, execute the
// brute-force oracle suites, and convert ledgers for plotting.
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime blow-up.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "nsk/nsk.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

nsk::ScalarField random_field(const nsk::Grid& g, std::mt19937_64& eng,
                              double lo, double hi) {
  nsk::ScalarField f(g);
  for (auto& v : f.values()) v = lo + (hi - lo) * uniform01(eng);
  return f;
}

struct SuiteResult {
  std::string name;
  bool pass;
  double worst;
  double tol;
  std::string metric;
};

SuiteResult oracle_convolution() {
  std::mt19937_64 eng(1001);
  double worst = 0.0;
  {
    nsk::Grid g(1, 64, 1.0);
    nsk::Kernel kg = nsk::Kernel::gaussian(g, 0.04);
    nsk::Kernel kt = nsk::Kernel::tent(g, 0.08);
    for (int trial = 0; trial < 20; ++trial) {
      const nsk::Kernel& k = trial % 2 ? kt : kg;
      nsk::ScalarField f = random_field(g, eng, -1.0, 2.0);
      nsk::ScalarField fast = k.convolve(f);
      nsk::ScalarField slow = nsk::reference::convolve_direct(k, f);
      double scale = std::max(1.0, nsk::max_abs(slow));
      for (std::size_t i = 0; i < fast.size(); ++i)
        worst = std::max(worst, std::abs(fast[i] - slow[i]) / scale);
    }
  }
  {
    nsk::Grid g(2, 32, 1.0);
    nsk::Kernel k = nsk::Kernel::gaussian(g, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
      nsk::ScalarField f = random_field(g, eng, -1.0, 1.0);
      nsk::ScalarField fast = k.convolve(f);
      nsk::ScalarField slow = nsk::reference::convolve_direct(k, f);
      double scale = std::max(1.0, nsk::max_abs(slow));
      for (std::size_t i = 0; i < fast.size(); ++i)
        worst = std::max(worst, std::abs(fast[i] - slow[i]) / scale);
    }
  }
  return {"convolution", worst <= 1e-11, worst, 1e-11, "max rel err"};
}

SuiteResult oracle_interaction() {
  std::mt19937_64 eng(1002);
  nsk::Grid g(1, 32, 1.0);
  nsk::Kernel k = nsk::Kernel::gaussian(g, 0.06);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    nsk::ScalarField rho = random_field(g, eng, 0.0, 2.0);
    double fast = nsk::interaction_energy(k, rho, 1.3);
    double slow = nsk::reference::interaction_energy_direct(k, rho, 1.3);
    worst = std::max(worst,
                     std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
  }
  return {"interaction", worst <= 1e-10, worst, 1e-10, "max rel err"};
}

SuiteResult oracle_exchange() {
  nsk::Grid g(1, 128, 1.0);
  nsk::Kernel k = nsk::Kernel::gaussian(g, 0.03);
  const double kappa = 1.2, wx = 2.0 * M_PI;
  auto rho_at = [&](double t) {
    nsk::ScalarField r(g);
    for (int i = 0; i < g.n(); ++i)
      r[i] = 1.0 + 0.2 * std::sin(wx * g.coord(i)) * std::cos(t) +
             0.1 * std::cos(2 * wx * g.coord(i)) * std::sin(t);
    return r;
  };
  const double t0 = 0.4;
  nsk::ScalarField rho = rho_at(t0);
  nsk::ScalarField d = nsk::capillarity_d(k, rho);
  nsk::ScalarField drho(g);
  for (int i = 0; i < g.n(); ++i)
    drho[i] = -0.2 * std::sin(wx * g.coord(i)) * std::sin(t0) +
              0.1 * std::cos(2 * wx * g.coord(i)) * std::cos(t0);
  double pairing = -kappa * nsk::integrate(nsk::cellwise_product(d, drho));
  auto centered = [&](double dt) {
    return (nsk::interaction_energy(k, rho_at(t0 + dt), kappa) -
            nsk::interaction_energy(k, rho_at(t0 - dt), kappa)) /
           (2.0 * dt);
  };
  double ratio = std::abs(centered(1e-3) - pairing) /
                 std::max(std::abs(centered(5e-4) - pairing), 1e-300);
  return {"exchange", ratio >= 3.5, ratio, 3.5, "dt-halving err ratio (>=)"};
}

SuiteResult oracle_thermo() {
  std::vector<nsk::PressureLaw> laws;
  for (double gamma : {1.0, 1.4, 2.0, 3.0})
    laws.push_back(nsk::PressureLaw::isentropic(1.0, gamma));
  laws.push_back(nsk::PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.1));
  double worst = 0.0;
  for (const auto& law : laws)
    for (int i = 1; i <= 100; ++i) {
      double s = 0.05 + 5.0 * i / 100.0;
      double eps = 1e-5 * s;
      double dpi =
          (law.free_energy(s + eps) - law.free_energy(s - eps)) / (2.0 * eps);
      double res = std::abs(law.pressure(s) - (s * dpi - law.free_energy(s))) /
                   (1.0 + std::abs(law.pressure(s)));
      worst = std::max(worst, res);
    }
  return {"thermo", worst <= 1e-6, worst, 1e-6, "max rel residual"};
}

SuiteResult oracle_splitting() {
  auto law = nsk::PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.1);
  nsk::SplitPressure sp(law);
  const int N = 10000;
  const double span = sp.rho_bar_split() * 1.5;
  double worst = 0.0;
  double prev = sp.p1(0.0);
  bool ok = true;
  for (int i = 1; i <= N; ++i) {
    double rho = span * i / N;
    double p1 = sp.p1(rho), p2 = sp.p2(rho);
    if (p1 - prev < -1e-9) ok = false;
    if (p2 < 0.0) ok = false;
    if (rho >= sp.rho_bar_split() && p2 != 0.0) ok = false;
    worst = std::max(worst, std::abs(p1 - p2 - law.pressure(rho)));
    prev = p1;
  }
  return {"splitting", ok && worst <= 1e-9, worst, 1e-9,
          "max reconstruction err"};
}

int run_oracles(const std::string& suite) {
  std::vector<SuiteResult> results;
  auto want = [&](const std::string& name) {
    return suite == "all" || suite == name;
  };
  if (want("convolution")) results.push_back(oracle_convolution());
  if (want("interaction")) results.push_back(oracle_interaction());
  if (want("exchange")) results.push_back(oracle_exchange());
  if (want("thermo")) results.push_back(oracle_thermo());
  if (want("splitting")) results.push_back(oracle_splitting());
  if (results.empty()) {
    std::cerr << "unknown oracle suite '" << suite
              << "' (convolution, interaction, exchange, thermo, splitting, "
                 "all)\n";
    return 1;
  }
  bool all_pass = true;
  std::printf("%-14s %-6s %-28s %s\n", "suite", "result", "metric", "value");
  for (const auto& r : results) {
    std::printf("%-14s %-6s %-28s %.3e (tol %.1e)\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.metric.c_str(), r.worst, r.tol);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int ledger_plot(const std::string& csv_path, std::string out_path) {
  std::ifstream is(csv_path);
  if (!is) {
    std::cerr << "cannot open ledger: " << csv_path << "\n";
    return 1;
  }
  if (out_path.empty()) out_path = csv_path + ".dat";
  std::ofstream os(out_path);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    for (auto& c : line)
      if (c == ',') c = ' ';
    if (first) {
      os << "# " << line << '\n';
      first = false;
    } else {
      os << line << '\n';
    }
  }
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal Navier-Stokes-Korteweg simulator and verification harness"};
  app.require_subcommand(1);

  std::string config_path, suite, csv_path, plot_out;

  auto* cmd_run = app.add_subcommand("run", "run a scenario to t_end");
  cmd_run->add_option("config", config_path, "config file")->required();

  auto* cmd_check = app.add_subcommand("check", "validate a config and exit");
  cmd_check->add_option("config", config_path, "config file")->required();

  auto* cmd_oracle =
      app.add_subcommand("oracle", "run a brute-force oracle suite");
  cmd_oracle->add_option("suite", suite, "suite name or 'all'")->required();

  auto* cmd_plot = app.add_subcommand(
      "ledger-plot", "convert a ledger CSV into a gnuplot-ready data file");
  cmd_plot->add_option("csv", csv_path, "ledger.csv path")->required();
  cmd_plot->add_option("-o,--output", plot_out, "output path (default <csv>.dat)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (cmd_check->parsed()) {
      nsk::parse_config(slurp(config_path));
      std::cerr << "config ok: " << config_path << "\n";
      return 0;
    }
    if (cmd_run->parsed()) {
      nsk::RunConfig cfg = nsk::parse_config(slurp(config_path));
      nsk::RunResult rr = nsk::run(cfg);
      std::cerr << "run complete: " << rr.steps << " steps, t = "
                << rr.final_state.t << ", ledger at " << rr.output_dir
                << "/ledger.csv\n";
      return 0;
    }
    if (cmd_oracle->parsed()) return run_oracles(suite);
    if (cmd_plot->parsed()) return ledger_plot(csv_path, plot_out);
  } catch (const nsk::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const nsk::BlowupError& e) {
    std::cerr << e.what() << " (last good snapshot written)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
