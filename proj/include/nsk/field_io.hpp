#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "nsk/grid.hpp"

// Field snapshot formats.
//
// Binary (little-endian): header {dim: u32, n: u32, L: f64, ncomp: u32},
// then ncomp * n^dim f64 values in row-major order (axis 0 slow), one
// component plane after another.
//
// CSV: two header rows ("dim,n,L,ncomp" then the values), followed by one
// value per line in the same order as the binary payload.

namespace nsk {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; this platform is not");

struct FieldSnapshot {
  Grid grid;
  int ncomp;  // 1 for scalar, dim for vector
  std::vector<double> values;

  ScalarField as_scalar() const {
    if (ncomp != 1)
      throw std::invalid_argument("snapshot has " + std::to_string(ncomp) +
                                  " components, expected scalar");
    return ScalarField(grid, values);
  }
  VectorField as_vector() const {
    if (ncomp != grid.dim())
      throw std::invalid_argument("snapshot component count does not match dim");
    return VectorField(grid, values);
  }
};

namespace detail {

inline void write_raw(std::ostream& os, const void* p, std::size_t bytes) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

inline void read_raw(std::istream& is, void* p, std::size_t bytes) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
  if (!is) throw std::runtime_error("snapshot read: truncated file");
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const Grid& g, int ncomp,
                           std::span<const double> values) {
  std::uint32_t dim = static_cast<std::uint32_t>(g.dim());
  std::uint32_t n = static_cast<std::uint32_t>(g.n());
  std::uint32_t nc = static_cast<std::uint32_t>(ncomp);
  double L = g.extent();
  detail::write_raw(os, &dim, 4);
  detail::write_raw(os, &n, 4);
  detail::write_raw(os, &L, 8);
  detail::write_raw(os, &nc, 4);
  detail::write_raw(os, values.data(), values.size() * sizeof(double));
}

inline void write_snapshot(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, f.grid(), 1, f.values());
}

inline void write_snapshot(const std::string& path, const VectorField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, f.grid(), f.ncomp(), f.values());
}

inline FieldSnapshot read_snapshot(std::istream& is) {
  std::uint32_t dim = 0, n = 0, nc = 0;
  double L = 0;
  detail::read_raw(is, &dim, 4);
  detail::read_raw(is, &n, 4);
  detail::read_raw(is, &L, 8);
  detail::read_raw(is, &nc, 4);
  Grid g(static_cast<int>(dim), static_cast<int>(n), L);
  std::vector<double> v(g.cell_count() * nc);
  detail::read_raw(is, v.data(), v.size() * sizeof(double));
  return FieldSnapshot{g, static_cast<int>(nc), std::move(v)};
}

inline FieldSnapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

inline void write_snapshot_csv(std::ostream& os, const Grid& g, int ncomp,
                               std::span<const double> values) {
  os << "dim,n,L,ncomp\n";
  os << g.dim() << ',' << g.n() << ',' << detail::format_double(g.extent())
     << ',' << ncomp << '\n';
  for (double v : values) os << detail::format_double(v) << '\n';
}

inline void write_snapshot_csv(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot_csv(os, f.grid(), 1, f.values());
}

inline void write_snapshot_csv(const std::string& path, const VectorField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot_csv(os, f.grid(), f.ncomp(), f.values());
}

inline FieldSnapshot read_snapshot_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "dim,n,L,ncomp")
    throw std::runtime_error("snapshot csv: bad header row");
  if (!std::getline(is, line))
    throw std::runtime_error("snapshot csv: missing metadata row");
  std::istringstream meta(line);
  int dim, n, nc;
  double L;
  char c1, c2, c3;
  if (!(meta >> dim >> c1 >> n >> c2 >> L >> c3 >> nc) || c1 != ',' ||
      c2 != ',' || c3 != ',')
    throw std::runtime_error("snapshot csv: bad metadata row");
  Grid g(dim, n, L);
  std::vector<double> v;
  v.reserve(g.cell_count() * nc);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    v.push_back(std::stod(line));
  }
  if (v.size() != g.cell_count() * static_cast<std::size_t>(nc))
    throw std::runtime_error("snapshot csv: value count mismatch");
  return FieldSnapshot{g, nc, std::move(v)};
}

inline FieldSnapshot read_snapshot_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot_csv(is);
}

}  // namespace nsk
