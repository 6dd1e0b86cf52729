#include <cmath>

#include "gen.hpp"
#include "lcbl/error.hpp"
#include "lcbl/field.hpp"
#include "lcbl/measures.hpp"

using namespace lcbl;

namespace {

void check_derivatives(const Potential& p, const Vec& x) {
  const Vec g = p.gradient(x);
  const Vec ng = numeric_gradient([&](const Vec& y) { return p.value(y); }, x);
  for (int i = 0; i < x.size(); ++i) CHECK(g[i] == doctest::Approx(ng[i]).epsilon(1e-6).scale(1.0));
  const Mat h = p.hessian(x);
  for (int j = 0; j < x.size(); ++j) {
    const Vec col = numeric_gradient([&](const Vec& y) { return p.gradient(y)[j]; }, x);
    for (int i = 0; i < x.size(); ++i) CHECK(h(i, j) == doctest::Approx(col[i]).epsilon(1e-5).scale(1.0));
  }
}

}  // namespace

TEST_CASE("property: analytic derivatives match finite differences") {
  gen::for_all("derivatives", 20, [](gen::Gen& g) {
    const int n = g.integer(1, 3);
    const Vec x = g.vec(n, 1.5);
    check_derivatives(*make_gaussian(n), x);
    check_derivatives(*make_cosh(n), x);
    check_derivatives(*make_quadratic(g.spd(n, 0.2, 5.0)), x);
    check_derivatives(*make_radial(radial_profile("s^2+s"), n), x);
    check_derivatives(*make_radial(polynomial_profile(0.5, 0.1), n), x);
    check_derivatives(*regularize(make_cosh(n), 0.3), x);
  });
}

TEST_CASE("gaussian is normalized in closed form") {
  const auto p = make_gaussian(2);
  Vec x(2);
  x << 0.0, 0.0;
  CHECK(std::exp(-p->value(x)) == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(p->gaussian_precision().has_value());
}

TEST_CASE("quadratic potential carries its precision") {
  Mat a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  const auto p = make_quadratic(a);
  REQUIRE(p->gaussian_precision());
  CHECK((*p->gaussian_precision() - a).norm() < 1e-15);
}

TEST_CASE("radial profiles by name") {
  for (const char* name : {"s/2", "s^2", "s^2+s", "cosh-radial"}) CHECK(radial_profile(name).name == name);
  CHECK_THROWS_AS(radial_profile("s^3"), Error);
}

TEST_CASE("flat directions are rejected") {
  const auto p = make_radial(radial_profile("s^2"), 2);
  try {
    hessian_spectrum_at(*p, Vec::Zero(2));
    FAIL("expected convexity-violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::convexity_violation);
  }
}

TEST_CASE("custom potentials fill in derivatives") {
  const auto p = make_custom(1, "quartic", [](const Vec& x) { return std::pow(x[0], 4) + x[0] * x[0]; });
  Vec x(1);
  x << 0.7;
  CHECK(p->gradient(x)[0] == doctest::Approx(4 * 0.343 + 1.4).epsilon(1e-6));
  CHECK(p->hessian(x)(0, 0) == doctest::Approx(12 * 0.49 + 2).epsilon(1e-4));
  CHECK(p->fd_hessian());
}

TEST_CASE("hessian spectrum is sorted and orthonormal") {
  gen::for_all("spectrum", 20, [](gen::Gen& g) {
    const int n = g.integer(1, 4);
    const Mat a = g.spd(n, 0.1, 10.0);
    const auto s = hessian_spectrum_at(*make_quadratic(a), g.vec(n));
    CHECK(s.lambda_min <= s.lambda_max);
    CHECK((s.basis.transpose() * s.basis - Mat::Identity(n, n)).norm() < 1e-10);
    CHECK((s.basis * s.values.asDiagonal() * s.basis.transpose() - a).norm() < 1e-9 * a.norm());
  });
}
