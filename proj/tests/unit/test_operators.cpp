#include <cmath>

#include "gen.hpp"
#include "lcbl/error.hpp"
#include "lcbl/field.hpp"
#include "lcbl/measures.hpp"
#include "lcbl/operators.hpp"
#include "lcbl/quadrature.hpp"
#include "lcbl/stencil.hpp"

using namespace lcbl;

TEST_CASE("fd weights reproduce the classic stencils") {
  const double o3[] = {-1.0, 0.0, 1.0};
  const auto d1 = fd_weights(o3, 1);
  CHECK(d1[0] == doctest::Approx(-0.5));
  CHECK(d1[1] == doctest::Approx(0.0));
  CHECK(d1[2] == doctest::Approx(0.5));
  const auto d2 = fd_weights(o3, 2);
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(d2[1] == doctest::Approx(-2.0));
  CHECK(d2[2] == doctest::Approx(1.0));
  const double o5[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto d4 = fd_weights(o5, 1);
  CHECK(d4[0] == doctest::Approx(1.0 / 12));
  CHECK(d4[1] == doctest::Approx(-8.0 / 12));
  CHECK(d4[3] == doctest::Approx(8.0 / 12));
}

TEST_CASE("property: stencils are exact on polynomials of their order") {
  gen::for_all("stencil", 30, [](gen::Gen& g) {
    const std::size_t count = static_cast<std::size_t>(g.integer(6, 40));
    const std::size_t index = static_cast<std::size_t>(g.integer(0, static_cast<int>(count) - 1));
    const int order = g.coin() ? 2 : 4;
    const int derivative = g.coin() ? 1 : 2;
    const Stencil s = derivative_stencil(index, count, derivative, order);
    const double c[6] = {g.normal(), g.normal(), g.normal(), g.normal(), g.normal(), g.normal()};
    const int degree = order + derivative - 1;
    auto poly = [&](double x) {
      double v = 0.0;
      for (int k = degree; k >= 0; --k) v = v * x + c[k];
      return v;
    };
    const double x0 = static_cast<double>(index);
    double approx = 0.0;
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
      const long at = static_cast<long>(index) + s.offsets[k];
      CHECK(at >= 0);
      CHECK(at < static_cast<long>(count));
      approx += s.weights[k] * poly(static_cast<double>(at));
    }
    double exact = 0.0;
    for (int k = derivative; k <= degree; ++k) {
      const double fall = derivative == 1 ? k : k * (k - 1);
      exact += c[k] * fall * std::pow(x0, k - derivative);
    }
    CHECK(approx == doctest::Approx(exact).epsilon(1e-7).scale(std::abs(exact) + std::pow(count, degree)));
  });
}

TEST_CASE("fd gradient converges at its order") {
  auto err = [](std::size_t nodes, int order) {
    const auto grid = build_grid(Box::cube(1, 2.0), nodes);
    const Field f = sample(tanh_function(0), grid);
    const VectorField d = fd_gradient(f, order);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double x = grid->coordinate(i, 0);
      worst = std::max(worst, std::abs(d.values[i] - 1.0 / std::pow(std::cosh(x), 2)));
    }
    return worst;
  };
  CHECK(err(65, 2) / err(129, 2) > 3.5);
  CHECK(err(65, 4) / err(129, 4) > 12.0);
}

TEST_CASE("generator on a linear function under the gaussian") {
  const auto q = reference_quadrature(make_gaussian(2), 33);
  const Field x1 = sample(coordinate_function(0), q->grid);
  for (StencilKind k : {StencilKind::central2, StencilKind::central4}) {
    const GeneratorResult r = apply_generator(*q, x1, k);
    for (std::size_t i = 0; i < q->size(); ++i) CHECK(r.values[i] == doctest::Approx(-x1[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("flux generator is self-adjoint in l2(m)") {
  const auto q = reference_quadrature(make_radial(radial_profile("s^2+s"), 2), 25);
  const GeneratorMatrix g = assemble_generator(*q, StencilKind::flux2);
  gen::for_all("self-adjoint", 5, [&](gen::Gen& gg) {
    Vec u(static_cast<long>(q->size())), v(static_cast<long>(q->size()));
    for (long i = 0; i < u.size(); ++i) {
      u[i] = gg.normal();
      v[i] = gg.normal();
    }
    const Vec lu = g.matrix * u, lv = g.matrix * v;
    double a = 0.0, b = 0.0;
    for (long i = 0; i < u.size(); ++i) {
      a += q->mass[static_cast<std::size_t>(i)] * lu[i] * v[i];
      b += q->mass[static_cast<std::size_t>(i)] * u[i] * lv[i];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  });
}

TEST_CASE("poisson solvers recover u = -x on the gaussian") {
  const auto q = reference_quadrature(make_gaussian(1), 129);
  const Field h = sample(coordinate_function(0), q->grid);
  const PoissonSolution exact = solve_poisson_1d_exact(*q, h);
  const PoissonSolution sparse = solve_poisson(*q, h);
  for (std::size_t i = 0; i < q->size(); ++i) {
    // Away from the truncation boundary, where the Neumann layer decays like e^{(x^2 - L^2)/2}.
    if (std::abs(q->grid->coordinate(i, 0)) > 3.0) continue;
    CHECK(exact.u[i] == doctest::Approx(-h[i]).epsilon(1e-6).scale(1.0));
    CHECK(sparse.u[i] == doctest::Approx(-h[i]).epsilon(1e-6).scale(1.0));
  }
  CHECK(sparse.residual < 1e-6);
  // Measured with fourth-order differences of u', so limited by the grid.
  CHECK(exact.residual < 1e-4);
}

TEST_CASE("poisson rejects mismatched fields and piecewise measures") {
  const auto q = reference_quadrature(make_gaussian(1), 33);
  CHECK_THROWS_AS(solve_poisson(*q, Field{q->grid, std::vector<double>(5, 0.0)}), Error);
  const auto pw = piecewise_quadrature(make_piecewise_1d({-1.0, 1.0}, {0.5}), 33);
  CHECK_THROWS_AS(solve_poisson(*pw, Field{pw->grid, std::vector<double>(33, 0.0)}), Error);
}

TEST_CASE("commutation holds exactly for quadratic u on the gaussian interior") {
  const auto q = reference_quadrature(make_gaussian(2), 129);
  const Field u = sample(square_function(0), q->grid);
  CHECK(check_commutation(*q, u, Box::cube(2, 4.0)) < 1e-4);
}

TEST_CASE("conjugate exponents") {
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3));
  CHECK(conjugate_exponent(std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("spectral field matches the hessian") {
  Mat a(2, 2);
  a << 3.0, 1.0, 1.0, 2.0;
  const auto q = reference_quadrature(make_quadratic(a), 17);
  const SpectralField& s = spectrum_of(*q);
  const double disc = std::sqrt(0.25 + 1.0);
  for (std::size_t i = 0; i < s.size(); i += 7) {
    CHECK(s.lambda_min(i) == doctest::Approx(2.5 - disc));
    CHECK(s.lambda_max(i) == doctest::Approx(2.5 + disc));
  }
  const double v[2] = {1.0, -2.0};
  double out[2];
  s.apply_power(0, v, 1.0, out);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(-3.0));
  CHECK(s.power_norm(0, v, 0.0) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("coarsening keeps the box and respects the limit") {
  const auto q = reference_quadrature(make_gaussian(2), 129);
  const auto c = coarsened(q, 2000);
  CHECK(c->size() <= 2000);
  CHECK(c->grid->axis(0).size() % 2 == 1);
  CHECK(c->grid->bounds().hi[0] == doctest::Approx(q->grid->bounds().hi[0]));
  CHECK(coarsened(q, 1000000) == q);
}
