#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "nsk/diagnostics.hpp"
#include "nsk/runner.hpp"

using namespace nsk;

namespace {

PhysParams make_params(const Grid& g, double mu = 1e-2, double lambda = 0.0,
                       double kappa = 1.0) {
  return PhysParams(mu, lambda, kappa, PressureLaw::isentropic(1.0, 2.0),
                    Kernel::gaussian(g, 0.03 * g.extent()));
}

}  // namespace

TEST_CASE("total energy of a constant state") {
  Grid g(1, 64, 2.0);
  PhysParams p = make_params(g);
  State s(0.0, ScalarField(g, 1.5), VectorField(g, 0.0));
  Energies e = total_energy(s, p, 1e-10);
  CHECK(e.kinetic == 0.0);
  CHECK(std::abs(e.nonlocal) <= 1e-12);
  double expected_free = g.extent() * p.law.free_energy(1.5);
  CHECK(e.free == Catch::Approx(expected_free).epsilon(1e-13));
}

TEST_CASE("doubling the momentum quadruples only the kinetic energy") {
  std::mt19937_64 eng(51);
  Grid g(1, 64, 1.0);
  PhysParams p = make_params(g);
  ScalarField rho = testing_helpers::random_field(g, eng, 0.5, 2.0);
  VectorField m = testing_helpers::random_vector_field(g, eng, -0.5, 0.5);
  State s1(0.0, rho, m);
  VectorField m2 = m;
  for (auto& v : m2.values()) v *= 2.0;
  State s2(0.0, rho, m2);
  Energies e1 = total_energy(s1, p, 1e-10);
  Energies e2 = total_energy(s2, p, 1e-10);
  CHECK(e2.kinetic == Catch::Approx(4.0 * e1.kinetic).epsilon(1e-13));
  CHECK(e2.free == e1.free);
  CHECK(e2.nonlocal == e1.nonlocal);
}

TEST_CASE("kinetic energy matches the brute-force sum") {
  std::mt19937_64 eng(52);
  Grid g(1, 32, 1.0);
  PhysParams p = make_params(g);
  ScalarField rho = testing_helpers::random_field(g, eng, 0.3, 2.0);
  VectorField m = testing_helpers::random_vector_field(g, eng, -1.0, 1.0);
  State s(0.0, rho, m);
  Energies e = total_energy(s, p, 1e-10);
  double brute = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    double u = m.comp(0, i) / rho[i];
    brute += 0.5 * rho[i] * u * u * g.cell_volume();
  }
  CHECK(std::abs(e.kinetic - brute) <= 1e-12 * std::max(1.0, brute));
}

TEST_CASE("effective flux of constant states") {
  Grid g(1, 64, 1.0);
  PhysParams p = make_params(g, 1e-2, 0.0, 2.0);
  State s(0.0, ScalarField(g, 1.5), VectorField(g, 0.0));
  ScalarField f = effective_flux(s, p, 1e-10);
  double expected = p.law.pressure(1.5) + 0.5 * 2.0 * 1.5 * 1.5;
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(f[i] == Catch::Approx(expected).epsilon(1e-14));

  // kappa = 0 and u = 0 reduces to the pressure field
  PhysParams p0 = make_params(g, 1e-2, 0.0, 0.0);
  std::mt19937_64 eng(53);
  ScalarField rho = testing_helpers::random_field(g, eng, 0.4, 2.0);
  State s0(0.0, rho, VectorField(g, 0.0));
  ScalarField f0 = effective_flux(s0, p0, 1e-10);
  for (std::size_t i = 0; i < f0.size(); ++i)
    CHECK(f0[i] == p0.law.pressure(rho[i]));
}

TEST_CASE("renorm residual is exactly zero on a constant trajectory") {
  Grid g(1, 64, 1.0);
  Snapshot s0{0.0, ScalarField(g, 1.0), VectorField(g, 0.0)};
  Snapshot s1{0.1, ScalarField(g, 1.0), VectorField(g, 0.0)};
  Snapshot s2{0.2, ScalarField(g, 1.0), VectorField(g, 0.0)};
  CHECK(renorm_residual(s0, s1, s2, BFunction::power(0.5)) == 0.0);
}

TEST_CASE("identity b reduces the renorm residual to the mass residual") {
  std::mt19937_64 eng(54);
  Grid g(1, 64, 1.0);
  auto snap = [&](double t) {
    Snapshot s{t, testing_helpers::random_field(g, eng, 0.5, 2.0),
               testing_helpers::random_vector_field(g, eng, -1.0, 1.0)};
    return s;
  };
  Snapshot s0 = snap(0.0), s1 = snap(0.01), s2 = snap(0.02);
  CHECK(renorm_residual(s0, s1, s2, BFunction::identity()) ==
        mass_residual(s0, s1, s2));
}

TEST_CASE("renorm residual rejects nonuniform snapshot spacing") {
  Grid g(1, 64, 1.0);
  Snapshot s0{0.0, ScalarField(g, 1.0), VectorField(g, 0.0)};
  Snapshot s1{0.1, ScalarField(g, 1.0), VectorField(g, 0.0)};
  Snapshot s2{0.25, ScalarField(g, 1.0), VectorField(g, 0.0)};
  CHECK_THROWS_AS(renorm_residual(s0, s1, s2, BFunction::identity()),
                  std::invalid_argument);
}

namespace {

// rho(t, x) = 1 + 0.1 sin(2 pi (x - t)), u = 1: an exact transport solution
Snapshot manufactured_snap(const Grid& g, double t) {
  Snapshot s{t, ScalarField(g), VectorField(g, 1.0)};
  for (int i = 0; i < g.n(); ++i)
    s.rho[i] =
        1.0 + 0.1 * std::sin(2.0 * M_PI * (g.coord(i) - t) / g.extent());
  return s;
}

double manufactured_residual(int n, const BFunction& bf) {
  Grid g(1, n, 1.0);
  double dt = 0.5 * g.h();
  return renorm_residual(manufactured_snap(g, 0.3 - dt),
                         manufactured_snap(g, 0.3),
                         manufactured_snap(g, 0.3 + dt), bf);
}

}  // namespace

TEST_CASE("renorm residual converges at second order on a smooth trajectory") {
  BFunction b = BFunction::power(1.0 / 3.0);
  double r64 = manufactured_residual(64, b);
  double r128 = manufactured_residual(128, b);
  CHECK(r64 / r128 >= 3.0);
}

TEST_CASE("concave cutoff matches its displayed branches exactly") {
  for (double k : {1.0, 2.0, 7.5}) {
    for (int j = 0; j <= 10; ++j) {
      double z = k * j / 10.0;
      CHECK(cutoff_tk(z, k) == z);
    }
    for (double z : {3.0 * k, 4.0 * k, 10.0 * k})
      CHECK(cutoff_tk(z, k) == 2.0 * k);
  }
  CHECK_THROWS_AS(cutoff_tk(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(cutoff_tk(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("concave cutoff has nonpositive second differences") {
  const double k = 2.0;
  const int N = 4000;
  const double hi = 4.0 * k, dz = hi / N;
  for (int i = 1; i + 1 <= N; ++i) {
    double z = i * dz;
    double second = cutoff_tk(z + dz, k) - 2.0 * cutoff_tk(z, k) +
                    cutoff_tk(z - dz, k);
    CHECK(second <= 1e-12);
  }
}

TEST_CASE("concave cutoff joins are C1") {
  const double k = 3.0, e = 1e-7;
  CHECK(std::abs(cutoff_tk_prime(k - e, k) - cutoff_tk_prime(k + e, k)) <=
        1e-6);
  CHECK(std::abs(cutoff_tk_prime(3 * k - e, k) -
                 cutoff_tk_prime(3 * k + e, k)) <= 1e-6);
}

TEST_CASE("log cutoff matches rho log rho below k and its tangent above") {
  const double k = 4.0;
  for (double rho : {0.0, 0.3, 1.0, 2.5, 4.0})
    CHECK(cutoff_lk(rho, k) ==
          (rho == 0.0 ? 0.0 : rho * std::log(rho)));
  // tangent-line extension stays within [0, rho log rho] for rho >= e
  for (double rho : {5.0, 8.0, 20.0, 100.0}) {
    double v = cutoff_lk(rho, k);
    CHECK(v >= 0.0);
    CHECK(v <= rho * std::log(rho) + 1e-12);
  }
}

TEST_CASE("integrability monitor validates the exponent window") {
  CHECK_NOTHROW(IntegrabilityMonitor(2.0, 1.0 / 3.0, 3));
  CHECK_THROWS_WITH(IntegrabilityMonitor(2.0, 0.5, 3),
                    Catch::Matchers::ContainsSubstring("4/N - 1"));
  CHECK_NOTHROW(IntegrabilityMonitor(2.0, 1.0, 2));
  CHECK_THROWS_AS(IntegrabilityMonitor(2.0, 1.01, 2), std::invalid_argument);
  CHECK_THROWS_AS(IntegrabilityMonitor(2.0, 0.25, 4), std::invalid_argument);
  CHECK_THROWS_AS(IntegrabilityMonitor(2.0, 0.0, 3), std::invalid_argument);
}

TEST_CASE("integrability monitor on the unit constant state is exact") {
  Grid g(1, 64, 2.0);
  ScalarField rho(g, 1.0);
  IntegrabilityMonitor mon(2.0, 0.25, 3);
  const double dt = 1e-3;
  for (int i = 0; i < 250; ++i) mon.accumulate(dt, rho);
  double T = 0.25;
  CHECK(mon.value() == Catch::Approx(T * g.extent() * 2.0).epsilon(1e-12));
  CHECK(mon.rate() == Catch::Approx(g.extent() * 2.0).epsilon(1e-12));
}

TEST_CASE("equilibrium energy vanishes at the equilibrium state") {
  Grid g(1, 64, 1.0);
  PhysParams p = make_params(g);
  State s(0.0, ScalarField(g, 1.3), VectorField(g, 0.0));
  EquilibriumEnergies e = equilibrium_energy(s, p, 1e-10, 1.3, 2.0, 1.0);
  CHECK(std::abs(e.kinetic) == 0.0);
  CHECK(std::abs(e.free) <= 1e-12);
  CHECK(std::abs(e.nonlocal) <= 1e-12);
}

TEST_CASE("equilibrium free part collapses for gamma = 2") {
  std::mt19937_64 eng(55);
  Grid g(1, 64, 1.0);
  PhysParams p = make_params(g);
  ScalarField rho = testing_helpers::random_field(g, eng, 0.5, 2.0);
  State s(0.0, rho, VectorField(g, 0.0));
  const double rho_bar = 1.1, a = 0.7;
  EquilibriumEnergies e = equilibrium_energy(s, p, 1e-10, rho_bar, 2.0, a);
  ScalarField d = rho - rho_bar;
  double expected = a * integrate(cellwise_product(d, d));
  CHECK(std::abs(e.free - expected) <= 1e-9 * std::max(1.0, expected));
}

TEST_CASE("equilibrium energy at gamma = 1 needs the extension flag") {
  Grid g(1, 32, 1.0);
  PhysParams p = make_params(g);
  State s(0.0, ScalarField(g, 1.0), VectorField(g, 0.0));
  CHECK_THROWS_AS(equilibrium_energy(s, p, 1e-10, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  EquilibriumEnergies e =
      equilibrium_energy(s, p, 1e-10, 1.0, 1.0, 1.0, /*extension=*/true);
  CHECK(std::abs(e.free) <= 1e-12);
}

TEST_CASE("orlicz perturbation norm and j_gamma integral vanish together") {
  Grid g(1, 64, 1.0);
  State s(0.0, ScalarField(g, 1.2), VectorField(g, 0.0));
  CHECK(orlicz_perturbation_norm(s, 1.2, 2.0) == 0.0);
  ScalarField jg(g);
  for (std::size_t i = 0; i < jg.size(); ++i)
    jg[i] = j_gamma(s.rho[i], 1.2, 2.0);
  CHECK(std::abs(integrate(jg)) <= 1e-13);
}

TEST_CASE("orlicz perturbation norm grows strictly with a bump family") {
  Grid g(1, 64, 1.0);
  double prev_norm = 0.0, prev_j = 0.0;
  for (double scale : {0.1, 0.4, 0.8}) {
    ScalarField rho(g, 1.0);
    for (int i = 0; i < g.n(); ++i) {
      double x = g.coord(i) - 0.5;
      rho[i] = 1.0 + scale * std::exp(-x * x / 0.01);
    }
    State s(0.0, rho, VectorField(g, 0.0));
    double norm = orlicz_perturbation_norm(s, 1.0, 3.0);
    ScalarField jg(g);
    for (std::size_t i = 0; i < jg.size(); ++i)
      jg[i] = j_gamma(rho[i], 1.0, 3.0);
    double ji = integrate(jg);
    CHECK(norm > prev_norm);
    CHECK(ji > prev_j);
    prev_norm = norm;
    prev_j = ji;
  }
}

TEST_CASE("gamma = 2: integral of j_2 equals the squared collapsed norm") {
  std::mt19937_64 eng(56);
  Grid g(1, 64, 1.0);
  ScalarField rho = testing_helpers::random_field(g, eng, 0.5, 1.6);
  State s(0.0, rho, VectorField(g, 0.0));
  double norm = orlicz_perturbation_norm(s, 1.0, 2.0);
  ScalarField jg(g);
  for (std::size_t i = 0; i < jg.size(); ++i)
    jg[i] = j_gamma(rho[i], 1.0, 2.0);
  CHECK(std::abs(integrate(jg) - norm * norm) <= 1e-9);
}

TEST_CASE("ledger enforces increasing time and writes fixed columns") {
  EnergyLedger led(1, false, false, false, false);
  LedgerRecord r;
  r.t = 0.0;
  led.append(r);
  r.t = 0.0;
  CHECK_THROWS_AS(led.append(r), std::invalid_argument);
  r.t = 0.5;
  r.mass = 1.25;
  led.append(r);
  std::ostringstream os;
  led.write_csv(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,mass,mom_x,kinetic,free,nonlocal,dissipation_cum,vacuum_cum");

  EnergyLedger led2(2, true, true, true, true);
  std::ostringstream os2;
  led2.write_csv(os2);
  CHECK(os2.str() ==
        "t,mass,mom_x,mom_y,kinetic,free,nonlocal,dissipation_cum,vacuum_cum,"
        "eq_kinetic,eq_free,eq_nonlocal,integ_accum,integ_rate,"
        "renorm_residual,orlicz_pert,jgamma_int\n");
}

TEST_CASE("capillary exchange bookkeeping holds along a smooth run") {
  // the centered time derivative of the nonlocal ledger column matches
  // -kappa * integral (phi*rho - rho) * drho/dt with drho/dt = -div m
  const std::string cfg_text = R"(
[grid]
dim = 1
n = 128
L = 1
[physics]
mu = 5e-3
lambda = 0
kappa = 1.5
[pressure]
type = isentropic
a = 1
gamma = 2
[kernel]
type = gaussian
sigma = 0.02
[scenario]
type = perturbation
rho_bar = 1
amplitude = 0.05
modes = 2
seed = 3
t_end = 0.02
dt = 2e-4
[output]
dir = test_out/exchange
snapshots = false
cadence = 1
)";
  RunConfig cfg = parse_config(cfg_text);
  State s = generate_initial(cfg.scenario, cfg.grid, cfg.phys.law, 0.0);
  const double eps_vac = 1e-10, dt = 2e-4;
  std::vector<double> nonlocal;
  std::vector<double> pairing;
  for (int k = 0; k < 40; ++k) {
    nonlocal.push_back(interaction_energy(cfg.phys.kernel, s.rho,
                                          cfg.phys.kappa));
    ScalarField d = capillarity_d(cfg.phys.kernel, s.rho);
    ScalarField drho = divergence(s.m);
    for (auto& v : drho.values()) v = -v;
    pairing.push_back(-cfg.phys.kappa *
                      integrate(cellwise_product(d, drho)));
    s = step(s, cfg.phys, dt, eps_vac).state;
  }
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 1; k + 1 < nonlocal.size(); ++k) {
    double ddt = (nonlocal[k + 1] - nonlocal[k - 1]) / (2.0 * dt);
    worst = std::max(worst, std::abs(ddt - pairing[k]));
    scale = std::max(scale, std::abs(pairing[k]));
  }
  // O(dt^2) + O(h^2) agreement; generous constant
  double h = cfg.grid.h();
  CHECK(worst <= 100.0 * scale * (dt * dt + h * h) + 1e-12);
}
