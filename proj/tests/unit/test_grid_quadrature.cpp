#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "lcbl/error.hpp"
#include "lcbl/grid.hpp"
#include "lcbl/measures.hpp"
#include "lcbl/quadrature.hpp"

using namespace lcbl;

TEST_CASE("trapezoid axis integrates linear functions exactly") {
  const Axis a = trapezoid_axis(-2.0, 3.0, 17);
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a.weights[i] * (3.0 * a.nodes[i] - 1.0);
    w += a.weights[i];
  }
  CHECK(w == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(s == doctest::Approx(1.5 * (9.0 - 4.0) - 5.0).epsilon(1e-13));
  CHECK(a.uniform);
  CHECK(a.spacing == doctest::Approx(5.0 / 16));
}

TEST_CASE("gauss-legendre axis is exact to degree 2*order-1") {
  const Axis a = gauss_legendre_axis(0.0, 2.0, 3, 4);
  CHECK(a.size() == 12);
  for (int deg = 0; deg <= 7; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.weights[i] * std::pow(a.nodes[i], deg);
    CHECK(s == doctest::Approx(std::pow(2.0, deg + 1) / (deg + 1)).epsilon(1e-12));
  }
}

TEST_CASE("grid enumerates the last axis fastest") {
  const auto g = build_grid(Box{{0.0, 0.0}, {1.0, 2.0}}, 17);
  CHECK(g->size() == 17 * 17);
  CHECK(g->coordinate(1, 1) == doctest::Approx(2.0 / 16));
  CHECK(g->coordinate(1, 0) == 0.0);
  CHECK(g->coordinate(17, 0) == doctest::Approx(1.0 / 16));
  CHECK(g->uniform());
}

TEST_CASE("grid budget and minimum nodes are enforced") {
  CHECK_THROWS_AS(build_grid(Box::cube(2, 1.0), 8), Error);
  CHECK_THROWS_AS(build_grid(Box::cube(3, 1.0), 1001, QuadratureRule::trapezoid, 1000000), Error);
}

TEST_CASE("gaussian quadrature moments") {
  for (int n = 1; n <= 3; ++n) {
    const auto q = reference_quadrature(make_gaussian(n), n == 3 ? 33 : 129);
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < q->size(); ++i) {
      const double x = q->grid->coordinate(i, 0);
      mass += q->mass[i];
      m1 += q->mass[i] * x;
      m2 += q->mass[i] * x * x;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m1) < 1e-12);
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(q->measure->normalization_residual()) < 1e-6);
  }
}

TEST_CASE("truncation box holds all but tail_tol of the mass") {
  const auto p = make_gaussian(1);
  const Box b = choose_truncation(*p, 1e-10);
  const double tail = std::erfc(b.hi[0] / std::numbers::sqrt2);
  CHECK(tail < 1e-10);
  CHECK(b.hi[0] < 10.0);
}

TEST_CASE("piecewise masses are exact") {
  const auto m = make_piecewise_1d({-1.0, 0.0, 2.0}, {0.5, 0.25});
  CHECK(m->mass_between(-1.0, 2.0) == doctest::Approx(1.0));
  CHECK(m->mass_between(-0.5, 1.0) == doctest::Approx(0.25 + 0.25));
  CHECK(m->first_moment_between(0.0, 2.0) == doctest::Approx(0.25 * 2.0));
  const auto q = piecewise_quadrature(m, 65);
  double total = 0.0;
  for (double w : q->mass) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("piecewise log-concavity flag") {
  CHECK(make_piecewise_1d({-1.0, 1.0}, {0.5})->log_concave());
  CHECK_FALSE(make_piecewise_1d({-1.0, -0.1, 0.1, 1.0}, {1.0 / 1.8, 0.0, 1.0 / 1.8})->log_concave());
}

TEST_CASE("property: integrate is linear and exact on constants") {
  const auto q = reference_quadrature(make_gaussian(2), 33);
  gen::for_all("integrate", 25, [&](gen::Gen& g) {
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    std::vector<double> u(q->size()), v(q->size()), w(q->size());
    for (std::size_t i = 0; i < q->size(); ++i) {
      u[i] = g.normal();
      v[i] = g.normal();
      w[i] = a * u[i] + b * v[i];
    }
    CHECK(integrate(w, *q) == doctest::Approx(a * integrate(u, *q) + b * integrate(v, *q)).epsilon(1e-12));
    std::vector<double> c(q->size(), a);
    CHECK(integrate(c, *q) == doctest::Approx(a).epsilon(1e-12));
  });
}
