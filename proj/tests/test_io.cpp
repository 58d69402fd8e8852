#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "nsk/field_io.hpp"
#include "nsk/runner.hpp"

using namespace nsk;
using testing_helpers::max_abs_diff;

TEST_CASE("binary snapshot round-trips scalar and vector fields") {
  std::mt19937_64 eng(61);
  Grid g(2, 16, 2.0);
  ScalarField f = testing_helpers::random_field(g, eng, -3.0, 3.0);
  VectorField v = testing_helpers::random_vector_field(g, eng);

  auto dir = std::filesystem::temp_directory_path() / "nsk_io_test";
  std::filesystem::create_directories(dir);
  auto fs = (dir / "scalar.bin").string();
  auto fv = (dir / "vector.bin").string();

  write_snapshot(fs, f);
  write_snapshot(fv, v);
  FieldSnapshot rs = read_snapshot(fs);
  FieldSnapshot rv = read_snapshot(fv);

  CHECK(rs.grid == g);
  CHECK(rs.ncomp == 1);
  CHECK(max_abs_diff(rs.as_scalar().values(), f.values()) == 0.0);
  CHECK(rv.ncomp == 2);
  CHECK(max_abs_diff(rv.as_vector().values(), v.values()) == 0.0);
}

TEST_CASE("binary snapshot header layout is 20 bytes plus payload") {
  Grid g(1, 8, 1.0);
  ScalarField f(g, 1.0);
  auto path = (std::filesystem::temp_directory_path() / "nsk_hdr.bin").string();
  write_snapshot(path, f);
  CHECK(std::filesystem::file_size(path) == 20 + 8 * sizeof(double));
  // header fields in order: dim u32, n u32, L f64, ncomp u32
  std::ifstream is(path, std::ios::binary);
  std::uint32_t dim, n, ncomp;
  double L;
  is.read(reinterpret_cast<char*>(&dim), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&ncomp), 4);
  CHECK(dim == 1u);
  CHECK(n == 8u);
  CHECK(L == 1.0);
  CHECK(ncomp == 1u);
}

TEST_CASE("csv snapshot round-trips bit-exactly") {
  std::mt19937_64 eng(62);
  Grid g(1, 32, 1.0);
  ScalarField f = testing_helpers::random_field(g, eng, -1.0, 1.0);
  auto path = (std::filesystem::temp_directory_path() / "nsk_io.csv").string();
  write_snapshot_csv(path, f);
  FieldSnapshot r = read_snapshot_csv(path);
  CHECK(r.grid == g);
  CHECK(max_abs_diff(r.as_scalar().values(), f.values()) == 0.0);
}

TEST_CASE("truncated snapshots are reported") {
  auto path = (std::filesystem::temp_directory_path() / "nsk_trunc.bin").string();
  {
    std::ofstream os(path, std::ios::binary);
    std::uint32_t dim = 1;
    os.write(reinterpret_cast<char*>(&dim), 4);
  }
  CHECK_THROWS_AS(read_snapshot(path), std::runtime_error);
}

TEST_CASE("runs are deterministic: identical configs give identical ledgers") {
  const std::string text = R"(
[grid]
dim = 1
n = 64
L = 1
[physics]
mu = 5e-3
lambda = 0
kappa = 1
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
amplitude = 0.02
modes = 3
seed = 42
t_end = 0.05
[output]
dir = DIR
snapshots = false
cadence = 5
)";
  auto run_once = [&](const std::string& dir) {
    std::string t = text;
    t.replace(t.find("DIR"), 3, dir);
    RunConfig cfg = parse_config(t);
    run(cfg);
    std::ifstream is(dir + "/ledger.csv");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  std::string a = run_once("test_out/det_a");
  std::string b = run_once("test_out/det_b");
  CHECK(a == b);
  CHECK(a.find("t,mass,mom_x,kinetic") == 0);
}

TEST_CASE("equilibrium run keeps every energy column flat") {
  const std::string text = R"(
[grid]
dim = 1
n = 64
L = 1
[physics]
mu = 1e-2
lambda = 0
kappa = 1
[pressure]
type = isentropic
a = 1
gamma = 2
[kernel]
type = gaussian
sigma = 0.02
[scenario]
type = equilibrium
rho_bar = 1
t_end = 0.05
[output]
dir = test_out/eq_flat
snapshots = false
cadence = 2
)";
  RunConfig cfg = parse_config(text);
  RunResult rr = run(cfg);
  REQUIRE(rr.ledger.records().size() >= 3);
  const auto& first = rr.ledger.records().front();
  for (const auto& rec : rr.ledger.records()) {
    CHECK(std::abs(rec.kinetic - first.kinetic) <= 1e-12);
    CHECK(std::abs(rec.free - first.free) <= 1e-12 * std::abs(first.free));
    CHECK(std::abs(rec.nonlocal - first.nonlocal) <= 1e-12);
    CHECK(std::abs(rec.mass - first.mass) <= 1e-12 * first.mass);
  }
}

TEST_CASE("snapshots are emitted with the configured naming") {
  const std::string text = R"(
[grid]
dim = 1
n = 64
L = 1
[scenario]
type = equilibrium
rho_bar = 1
t_end = 0.01
[output]
dir = test_out/snaps
snapshots = true
snapshot_format = both
cadence = 1000000
)";
  RunConfig cfg = parse_config(text);
  RunResult rr = run(cfg);
  CHECK(std::filesystem::exists("test_out/snaps/snap_0.bin"));
  CHECK(std::filesystem::exists("test_out/snaps/snap_0.csv"));
  CHECK(std::filesystem::exists(std::filesystem::path(rr.output_dir) /
                                "ledger.csv"));
  FieldSnapshot s = read_snapshot("test_out/snaps/snap_0.bin");
  CHECK(s.grid == cfg.grid);
}

TEST_CASE("NSK_OUT_DIR overrides the output root") {
  const std::string text = R"(
[grid]
dim = 1
n = 64
L = 1
[scenario]
type = equilibrium
rho_bar = 1
t_end = 0
[output]
dir = sub
snapshots = false
)";
  RunConfig cfg = parse_config(text);
  setenv("NSK_OUT_DIR", "test_out/rooted", 1);
  RunResult rr = run(cfg);
  unsetenv("NSK_OUT_DIR");
  CHECK(rr.output_dir == std::filesystem::path("test_out/rooted/sub").string());
  CHECK(std::filesystem::exists("test_out/rooted/sub/ledger.csv"));
}
