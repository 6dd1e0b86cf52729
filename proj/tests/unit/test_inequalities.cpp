#include <cmath>
#include <limits>
#include <numbers>

#include "gen.hpp"
#include "lcbl/error.hpp"
#include "lcbl/inequalities.hpp"
#include "lcbl/measures.hpp"
#include "lcbl/quadrature.hpp"

using namespace lcbl;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

bool holds(const InequalityReport& r) { return r.all_hold(); }

}  // namespace

TEST_CASE("variance inequality is tight for linear functions under the gaussian") {
  const auto q = reference_quadrature(make_gaussian(2), 65);
  const InequalityReport r = verify_bl_variance(q, coordinate_function(1));
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.verdict == Verdict::holds_at_equality);
}

TEST_CASE("asymmetric inequality is sharp on the gaussian for every p") {
  const auto q = reference_quadrature(make_gaussian(1), 129);
  for (double p : {2.0, 3.0, 8.0, kInf}) {
    const InequalityReport r = verify_asym(q, coordinate_function(0), coordinate_function(0), p);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(holds(r));
    bool has_cobo7 = false;
    for (const auto& s : r.sub_reports) has_cobo7 = has_cobo7 || s.name == "cobo7";
    CHECK(has_cobo7);
  }
}

TEST_CASE("p below 2 is a domain error") {
  const auto q = reference_quadrature(make_gaussian(1), 33);
  try {
    verify_asym(q, coordinate_function(0), coordinate_function(0), 1.5);
    FAIL("expected domain-error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain_error);
  }
}

TEST_CASE("constant h gives a degenerate report at equality") {
  const auto q = reference_quadrature(make_gaussian(1), 33);
  const InequalityReport r = verify_asym(q, coordinate_function(0), constant_function(1, 2.0), 2.0);
  CHECK(r.degenerate);
  CHECK(r.ratio == 1.0);
  CHECK(r.verdict == Verdict::holds_at_equality);
}

TEST_CASE("cosh measure at p = infinity matches the closed sup formula") {
  const auto q = reference_quadrature(make_cosh(1), 257);
  const InequalityReport r = verify_asym(q, coordinate_function(0), tanh_function(0), kInf);
  CHECK(r.rhs == doctest::Approx(bl3_rhs(*q, coordinate_function(0), tanh_function(0))).epsilon(1e-6));
  CHECK(r.ratio <= 1.0 + 1e-3);
}

TEST_CASE("property: asymmetric inequality holds on random tilts of random quadratics") {
  gen::for_all("asym", 6, [](gen::Gen& g) {
    Mat a = g.spd(2, 0.3, 4.0);
    const auto q = reference_quadrature(make_quadratic(a), 49);
    const Vec c = g.vec(2);
    const double p = g.coin() ? 2.0 : g.uniform(2.0, 10.0);
    const InequalityReport r = verify_asym(q, tanh_function(g.integer(0, 1)), tilt_function(c, 0.5), p);
    CHECK(holds(r));
  });
}

TEST_CASE("divided differences stay below 2^n") {
  for (int n = 1; n <= 2; ++n) {
    const auto q = reference_quadrature(make_gaussian(n), n == 1 ? 257 : 49);
    const InequalityReport r = verify_divided_difference(q->measure, q, tanh_function(0));
    CHECK(holds(r));
    CHECK(r.rhs > 0.0);
  }
}

TEST_CASE("divided differences fall back to monte carlo without a grid") {
  const auto m = reference_quadrature(make_gaussian(2), 17)->measure;
  VerifyOptions o;
  CHECK_THROWS_AS(verify_divided_difference(m, nullptr, coordinate_function(0), o), Error);
  o.mc.seed = 11;
  o.mc.samples = 50000;
  const InequalityReport r = verify_divided_difference(m, nullptr, coordinate_function(0), o);
  REQUIRE(r.sigma.has_value());
  CHECK(*r.sigma > 0.0);
  CHECK(holds(r));
}

TEST_CASE("characteristic mode on the uniform half-line") {
  const auto m = make_piecewise_1d({-1.0, 1.0}, {0.5});
  const InequalityReport r = verify_divided_difference_set(m, SetSpec::upper_half_line(0.0));
  CHECK(r.lhs == doctest::Approx(std::numbers::ln2).epsilon(1e-10));
  CHECK(r.rhs == doctest::Approx(1.0));
  CHECK(r.meta["ratio_without_factor"].get<double>() == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-10));
}

TEST_CASE("a set boundary in a zero-density gap is reported as violated") {
  const auto m = make_piecewise_1d({-1.0, -0.2, 0.2, 1.0}, {0.625, 0.0, 0.625});
  const InequalityReport r = verify_divided_difference_set(m, SetSpec::upper_half_line(0.0));
  CHECK(std::isinf(r.ratio));
  CHECK(r.verdict == Verdict::violated);
}

TEST_CASE("halfspace sets in two dimensions") {
  const auto q = reference_quadrature(make_gaussian(2), 49);
  Vec d(2);
  d << 1.0, 1.0;
  const InequalityReport r = verify_divided_difference_set(q->measure, SetSpec::halfspace(d, 0.2), q);
  CHECK(holds(r));
  CHECK(r.rhs > 0.0);
}

TEST_CASE("layer cake and cov6 bounds hold on the gaussian") {
  const auto q = reference_quadrature(make_gaussian(1), 129);
  Vec c(1);
  c << 0.5;
  CHECK(holds(verify_layer_cake(q, exp_linear_function(c))));
  CHECK_THROWS_AS(verify_layer_cake(q, coordinate_function(0)), Error);
  CHECK(holds(verify_cov6(q, coordinate_function(0), tanh_function(0))));
}

TEST_CASE("dual identity on a smooth two-dimensional case") {
  const auto q = reference_quadrature(make_radial(radial_profile("s^2+s"), 2), 65);
  Vec c(2);
  c << 0.6, -0.4;
  const InequalityReport r = verify_dual_estimate(q, tanh_function(0), tilt_function(c, 0.5), 3.0);
  CHECK(r.meta["dual_identity"]["relative_error"].get<double>() < 1e-4);
  CHECK(r.meta["poisson"]["residual"].get<double>() < 1e-6);
  CHECK(holds(r));
}
