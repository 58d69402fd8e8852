#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "nsk/operators.hpp"

using namespace nsk;
using testing_helpers::max_abs_diff;
using testing_helpers::random_field;
using testing_helpers::random_vector_field;
using testing_helpers::shift;

namespace {

ScalarField sine_field(const Grid& g, int k = 1) {
  ScalarField f(g);
  for (int i = 0; i < g.n(); ++i)
    f[i] = std::sin(2.0 * M_PI * k * g.coord(i) / g.extent());
  return f;
}

}  // namespace

TEST_CASE("gradient of a constant field is exactly zero") {
  for (int dim : {1, 2}) {
    Grid g(dim, 16, 1.0);
    VectorField grad = gradient(ScalarField(g, 5.0));
    CHECK(max_abs(grad) == 0.0);
  }
}

TEST_CASE("gradient matches the analytic derivative of a sine at O(h^2)") {
  Grid g(1, 64, 1.0);
  ScalarField f = sine_field(g);
  VectorField grad = gradient(f);
  const double w = 2.0 * M_PI / g.extent();
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    err = std::max(err, std::abs(grad.comp(0, i) - w * std::cos(w * g.coord(i))));
  // centered stencil error for sin is (w^3 h^2 / 6) cos + h.o.t.
  double bound = w * w * w * g.h() * g.h() / 6.0 * 1.1;
  CHECK(err <= bound);
}

TEST_CASE("gradient of a one-hot field hits only the neighbors") {
  Grid g(1, 16, 1.0);
  const int j = 5;
  ScalarField f(g, 0.0);
  f[j] = 1.0;
  VectorField grad = gradient(f);
  const double expected = 1.0 / (2.0 * g.h());
  for (int i = 0; i < g.n(); ++i) {
    if (i == j - 1)
      CHECK(grad.comp(0, i) == expected);  // (f(j) - f(j-2)) / 2h
    else if (i == j + 1)
      CHECK(grad.comp(0, i) == -expected);
    else
      CHECK(grad.comp(0, i) == 0.0);
  }
}

TEST_CASE("divergence of a constant vector field is exactly zero") {
  Grid g(2, 16, 1.0);
  VectorField v(g, 1.0);
  CHECK(max_abs(divergence(v)) == 0.0);
}

TEST_CASE("divergence of a gradient equals the composed stencil exactly") {
  std::mt19937_64 eng(3);
  for (int dim : {1, 2}) {
    Grid g(dim, 16, 2.0);
    ScalarField f = random_field(g, eng, -1.0, 1.0);
    ScalarField lhs = divergence(gradient(f));
    // the composed wide stencil, assembled independently
    ScalarField rhs(g, 0.0);
    const double c = 1.0 / (4.0 * g.h() * g.h());
    const int n = g.n();
    for (int ix = 0; ix < n; ++ix) {
      int niy = dim == 2 ? n : 1;
      for (int iy = 0; iy < niy; ++iy) {
        double acc = c * (f.at(g.wrap(ix + 2), iy) - 2.0 * f.at(ix, iy) +
                          f.at(g.wrap(ix - 2), iy));
        if (dim == 2)
          acc += c * (f.at(ix, g.wrap(iy + 2)) - 2.0 * f.at(ix, iy) +
                      f.at(ix, g.wrap(iy - 2)));
        rhs.at(ix, iy) = acc;
      }
    }
    CHECK(max_abs_diff(lhs.values(), rhs.values()) <= 1e-13);
  }
}

TEST_CASE("divergence of cos matches the analytic derivative at O(h^2)") {
  Grid g(1, 64, 1.0);
  VectorField v(g);
  const double w = 2.0 * M_PI / g.extent();
  for (int i = 0; i < g.n(); ++i) v.comp(0, i) = std::cos(w * g.coord(i));
  ScalarField d = divergence(v);
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    err = std::max(err, std::abs(d[i] + w * std::sin(w * g.coord(i))));
  CHECK(err <= w * w * w * g.h() * g.h() / 6.0 * 1.1);
}

TEST_CASE("laplacians annihilate constants") {
  Grid g(2, 16, 1.0);
  CHECK(max_abs(laplacian(ScalarField(g, 7.5))) == 0.0);
  CHECK(max_abs(laplacian_vector(VectorField(g, -2.0))) == 0.0);
  CHECK(max_abs(grad_div(VectorField(g, 3.0))) == 0.0);
}

TEST_CASE("laplacian of sin matches -(w^2) sin at O(h^2)") {
  Grid g(1, 64, 1.0);
  ScalarField f = sine_field(g);
  ScalarField lap = laplacian(f);
  const double w = 2.0 * M_PI / g.extent();
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    err = std::max(err, std::abs(lap[i] + w * w * f[i]));
  CHECK(err <= w * w * w * w * g.h() * g.h() / 12.0 * 1.1);
}

TEST_CASE("1D grad_div equals div(grad) composed per component") {
  std::mt19937_64 eng(4);
  Grid g(1, 32, 1.0);
  VectorField v = random_vector_field(g, eng);
  VectorField lhs = grad_div(v);
  ScalarField comp(g, 0.0);
  std::copy(v.component(0).begin(), v.component(0).end(),
            comp.values().begin());
  ScalarField rhs = divergence(gradient(comp));
  CHECK(max_abs_diff(lhs.component(0), rhs.values()) <= 1e-14);
}

TEST_CASE("operators commute with periodic shifts exactly") {
  std::mt19937_64 eng(5);
  for (int dim : {1, 2}) {
    Grid g(dim, 16, 1.0);
    ScalarField f = random_field(g, eng, -2.0, 2.0);
    VectorField v = random_vector_field(g, eng);
    const int sx = 5, sy = dim == 2 ? 11 : 0;

    CHECK(max_abs_diff(gradient(shift(f, sx, sy)).values(),
                       shift(gradient(f), sx, sy).values()) == 0.0);
    CHECK(max_abs_diff(divergence(shift(v, sx, sy)).values(),
                       shift(divergence(v), sx, sy).values()) == 0.0);
    CHECK(max_abs_diff(laplacian(shift(f, sx, sy)).values(),
                       shift(laplacian(f), sx, sy).values()) == 0.0);
  }
}

TEST_CASE("operators are linear") {
  std::mt19937_64 eng(6);
  Grid g(2, 16, 1.5);
  ScalarField f = random_field(g, eng, -1.0, 1.0);
  ScalarField q = random_field(g, eng, -1.0, 1.0);
  const double a = 1.7, b = -0.4;
  ScalarField combo(g);
  for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f[i] + b * q[i];

  VectorField lhs = gradient(combo);
  VectorField gf = gradient(f), gq = gradient(q);
  double scale = std::max(max_abs(gf), max_abs(gq));
  double err = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    err = std::max(err, std::abs(lhs.values()[i] - (a * gf.values()[i] +
                                                    b * gq.values()[i])));
  CHECK(err <= 1e-13 * scale);
}

TEST_CASE("gradient and laplacian converge at second order on smooth fields") {
  auto max_err = [](int n, bool lap) {
    Grid g(1, n, 1.0);
    ScalarField f = sine_field(g, 3);
    const double w = 6.0 * M_PI;
    double err = 0.0;
    if (lap) {
      ScalarField l = laplacian(f);
      for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(l[i] + w * w * f[i]));
    } else {
      VectorField d = gradient(f);
      for (int i = 0; i < n; ++i)
        err = std::max(err,
                       std::abs(d.comp(0, i) - w * std::cos(w * g.coord(i))));
    }
    return err;
  };
  for (bool lap : {false, true}) {
    double e64 = max_err(64, lap), e128 = max_err(128, lap);
    CHECK(e64 / e128 >= 3.5);
  }
}
