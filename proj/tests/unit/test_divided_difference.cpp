#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string_view>

#include "gen.hpp"
#include "lcbl/divided_difference.hpp"
#include "lcbl/error.hpp"
#include "lcbl/field.hpp"
#include "lcbl/inequalities.hpp"
#include "lcbl/kernels.hpp"
#include "lcbl/measures.hpp"
#include "lcbl/quadrature.hpp"

using namespace lcbl;

TEST_CASE("cell pair kernel against a direct double integral") {
  // Separated cells: the integrand is smooth, so a fine midpoint rule is accurate.
  const int k = 400;
  double direct = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double x = (i + 0.5) / k, y = 2.0 + 1.5 * (j + 0.5) / k;
      direct += 1.5 / (k * k) / (y - x);
    }
  }
  CHECK(cell_pair_kernel(0.0, 1.0, 2.0, 3.5) == doctest::Approx(direct).epsilon(1e-5));
  CHECK(cell_pair_kernel(2.0, 3.5, 0.0, 1.0) == doctest::Approx(direct).epsilon(1e-5));
  // Adjacent cells: int_0^1 int_1^2 dy dx/(y-x) = 2 ln 2.
  CHECK(cell_pair_kernel(0.0, 1.0, 1.0, 2.0) == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-12));
}

TEST_CASE("half-line on the uniform measure") {
  const auto m = make_piecewise_1d({-1.0, 1.0}, {0.5});
  for (std::size_t cells : {64u, 256u, 1024u}) {
    const CellGrid1D cg = cell_grid_1d(*m, cells);
    const auto in = cells_in_set(cg, SetSpec::upper_half_line(0.0));
    CHECK(set_divided_difference_1d(cg, in) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(set_boundary_1d(*m, cg, in) == doctest::Approx(0.5));
  }
}

TEST_CASE("cell grids carry exact masses and include the breakpoints") {
  const auto m = make_piecewise_1d({-1.0, -0.3, 0.4, 1.0}, {0.2, 0.6, 0.3});
  const double total = 0.2 * 0.7 + 0.6 * 0.7 + 0.3 * 0.6;
  const auto mm = make_piecewise_1d({-1.0, -0.3, 0.4, 1.0}, {0.2 / total, 0.6 / total, 0.3 / total});
  const CellGrid1D cg = cell_grid_1d(*mm, 10, {0.05});
  double sum = 0.0;
  for (double w : cg.mass) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  for (double e : {-0.3, 0.4, 0.05}) {
    bool found = false;
    for (double edge : cg.edges) found = found || std::abs(edge - e) < 1e-14;
    CHECK(found);
  }
}

TEST_CASE("property: pairwise covariance equals the moment formula") {
  const auto q = reference_quadrature(make_gaussian(2), 25);
  gen::for_all("covariance", 10, [&](gen::Gen& g) {
    Field a{q->grid, std::vector<double>(q->size())}, b{q->grid, std::vector<double>(q->size())};
    for (std::size_t i = 0; i < q->size(); ++i) {
      a.values[i] = g.normal();
      b.values[i] = 0.3 * a.values[i] + g.normal();
    }
    CHECK(covariance_pairwise(*q, a, b) == doctest::Approx(covariance(*q, a, b)).epsilon(1e-10));
  });
}

TEST_CASE("divided difference of a linear function under the gaussian") {
  // E|c.(X-Y)|/|X-Y| = |c| E|u_1| for u uniform on the sphere.
  const auto q1 = reference_quadrature(make_gaussian(1), 257);
  const Field h1 = sample(coordinate_function(0), q1->grid);
  CHECK(divided_difference_field(*q1, h1, sample_gradient(coordinate_function(0), q1->grid)) ==
        doctest::Approx(1.0).epsilon(1e-3));
  const auto q2 = reference_quadrature(make_gaussian(2), 65);
  const Field h2 = sample(coordinate_function(1), q2->grid);
  CHECK(divided_difference_field(*q2, h2, sample_gradient(coordinate_function(1), q2->grid)) ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(5e-3));
}

TEST_CASE("monte carlo divided difference is unbiased within 4 sigma") {
  const MeasurePtr m = reference_quadrature(make_gaussian(3), 17)->measure;
  const Sampler s(m, nullptr);
  CHECK(s.method() == "gaussian-exact");
  MonteCarloOptions o;
  o.samples = 100000;
  o.seed = 7;
  const MonteCarloEstimate e = divided_difference_mc(s, coordinate_function(0), 8.0, o);
  CHECK(std::abs(e.lhs - 0.5) < 4.0 * e.lhs_sigma);
  CHECK(e.rhs == doctest::Approx(8.0));
  const MonteCarloEstimate again = divided_difference_mc(s, coordinate_function(0), 8.0, o);
  CHECK(again.lhs == e.lhs);
}

TEST_CASE("monte carlo requires a seed") {
  const MeasurePtr m = reference_quadrature(make_gaussian(1), 17)->measure;
  CHECK_THROWS_AS(divided_difference_mc(Sampler(m, nullptr), coordinate_function(0), 2.0, {}), Error);
}

namespace {

struct Points {
  std::vector<std::vector<double>> coords;
  std::vector<const double*> ptrs;
  PointSet set;
};

Points random_points(gen::Gen& g, int n, std::size_t count) {
  Points p;
  p.coords.assign(static_cast<std::size_t>(n), std::vector<double>(count));
  for (auto& axis : p.coords)
    for (double& v : axis) v = g.uniform(-3.0, 3.0);
  for (auto& axis : p.coords) p.ptrs.push_back(axis.data());
  p.set = PointSet{n, p.ptrs.data(), count};
  return p;
}

}  // namespace

TEST_CASE("property: simd kernels agree with the scalar kernels") {
  const KernelTable* simd = avx2_kernels();
  if (!simd) {
    MESSAGE("AVX2 not available; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  gen::for_all("kernels", 60, [&](gen::Gen& g) {
    const int n = g.integer(1, 4);
    const std::size_t count = static_cast<std::size_t>(g.integer(1, 300));
    Points p = random_points(g, n, count);
    std::vector<double> h(count), w(count), gg(count);
    for (std::size_t j = 0; j < count; ++j) {
      h[j] = g.normal();
      gg[j] = g.normal();
      w[j] = g.uniform(0.0, 1.0);
    }
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (double& v : xi) v = g.uniform(3.5, 4.0);  // outside the cloud: no zero distances
    const std::size_t begin = static_cast<std::size_t>(g.integer(0, static_cast<int>(count) - 1));
    const std::size_t end = static_cast<std::size_t>(g.integer(static_cast<int>(begin), static_cast<int>(count)));
    const double a = ref.divdiff_row(p.set, xi.data(), 0.4, h.data(), w.data(), begin, end);
    const double b = simd->divdiff_row(p.set, xi.data(), 0.4, h.data(), w.data(), begin, end);
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
    CHECK(simd->inverse_distance_row(p.set, xi.data(), w.data(), begin, end) ==
          doctest::Approx(ref.inverse_distance_row(p.set, xi.data(), w.data(), begin, end)).epsilon(1e-12));
    CHECK(simd->pair_covariance_row(0.3, -0.2, gg.data(), h.data(), w.data(), begin, end) ==
          doctest::Approx(ref.pair_covariance_row(0.3, -0.2, gg.data(), h.data(), w.data(), begin, end))
              .epsilon(1e-12)
              .scale(1.0));
  });
}

TEST_CASE("kernel selection honours the scalar override") {
  CHECK(scalar_kernels().name == "scalar");
  if (avx2_kernels()) CHECK(avx2_kernels()->name == "avx2");
}

TEST_CASE("active kernels follow LCBL_SIMD") {
  const char* env = std::getenv("LCBL_SIMD");
  if (env && std::string_view(env) == "scalar") {
    CHECK(active_kernels().name == "scalar");
  } else if (avx2_kernels()) {
    CHECK(active_kernels().name == "avx2");
  } else {
    CHECK(active_kernels().name == "scalar");
  }
}
