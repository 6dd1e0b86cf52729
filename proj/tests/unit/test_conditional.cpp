#include <cmath>

#include "gen.hpp"
#include "lcbl/conditional.hpp"
#include "lcbl/error.hpp"
#include "lcbl/measures.hpp"
#include "lcbl/quadrature.hpp"

using namespace lcbl;

TEST_CASE("split measure slices carry the joint mass") {
  const auto q = reference_quadrature(make_gaussian(2), 33);
  const SplitMeasure sm = split_measure(q, 1);
  CHECK(sm.ny == 33);
  CHECK(sm.nz == 33);
  double total = 0.0;
  for (double w : sm.slice_mass) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  double cond = 0.0;
  for (std::size_t j = 0; j < sm.nz; ++j) cond += sm.weight(16, j);
  CHECK(cond == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: tower rule for conditional means") {
  Mat a(2, 2);
  a << 2.0, 0.6, 0.6, 1.0;
  const auto q = reference_quadrature(make_quadratic(a), 33);
  const SplitMeasure sm = split_measure(q, 1);
  gen::for_all("tower", 10, [&](gen::Gen& g) {
    Field h{q->grid, std::vector<double>(q->size())};
    for (double& v : h.values) v = g.normal();
    const ConditionalDecomposition d = conditional_decompose(sm, h);
    double outer = 0.0;
    for (std::size_t k = 0; k < sm.ny; ++k) outer += d.nu[k] * d.mean[k];
    CHECK(outer == doctest::Approx(integrate(h, *q)).epsilon(1e-10).scale(1e-12));
  });
}

TEST_CASE("split measure rejects bad splits") {
  const auto q = reference_quadrature(make_gaussian(2), 17);
  CHECK_THROWS_AS(split_measure(q, 0), Error);
  CHECK_THROWS_AS(split_measure(q, 2), Error);
}

TEST_CASE("fisher bound on the gaussian with C = 2") {
  const auto q = reference_quadrature(make_gaussian(2), 65);
  Vec c(2);
  c << 0.7, 0.4;
  const InequalityReport r = verify_conditional_fisher(split_measure(q, 1), tilt_function(c, 0.5));
  CHECK(r.meta["C"].get<double>() == doctest::Approx(2.0));
  CHECK(r.all_hold());
  bool eig37 = false, eig5 = false;
  for (const auto& s : r.sub_reports) {
    eig37 = eig37 || s.name == "eig37";
    eig5 = eig5 || s.name == "eig5";
  }
  CHECK(eig37);
  CHECK(eig5);
}

TEST_CASE("bl35 ratios grow with M") {
  const ScanResult s = bl35_impossibility_scan({10.0, 100.0, 1000.0});
  REQUIRE(s.ratios.size() == 3);
  CHECK(s.ratios[2] >= 10.0 * s.ratios[0]);
  CHECK(s.flags.empty());
}
