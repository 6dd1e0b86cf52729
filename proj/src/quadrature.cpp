#include "lcbl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lcbl/error.hpp"
#include "lcbl/parallel.hpp"

namespace lcbl {

namespace {

constexpr double kTruncationStep = 0.25;
constexpr long kMaxTruncationSteps = 1'000'000;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlX = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlW = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

}  // namespace

Box choose_truncation(const Potential& p, double tail_tol) {
  if (!(tail_tol > 0.0) || !(tail_tol < 1e-2)) {
    throw Error(ErrorKind::invalid_input, "tail_tol must lie in (0, 1e-2)");
  }
  const int n = p.dimension();
  Box box = Box::cube(n, 0.0);
  const Vec origin = Vec::Zero(n);
  const double f0 = p.value(origin);
  const double side_tol = tail_tol / (2.0 * n);
  for (int a = 0; a < n; ++a) {
    auto along = [&](double t) {
      Vec x = origin;
      x[a] = t;
      return x;
    };
    // Unnormalized axis mass of e^{-(f - f0)} over [-r_minus, r_plus].
    double z = 0.0;
    std::array<double, 2> r = {0.0, 0.0};
    std::array<bool, 2> done = {false, false};
    for (long step = 0; !(done[0] && done[1]); ++step) {
      if (step >= kMaxTruncationSteps) {
        throw Error(ErrorKind::truncation_failure,
                    "tail bound not reached within 1e6 expansion steps on axis " + std::to_string(a) +
                        "; the potential grows too slowly");
      }
      for (int s = 0; s < 2; ++s) {
        if (done[s]) continue;
        const double sign = s == 0 ? 1.0 : -1.0;
        const double lo = r[s];
        const double hi = lo + kTruncationStep;
        for (std::size_t k = 0; k < kGlX.size(); ++k) {
          const double t = lo + 0.5 * kTruncationStep * (kGlX[k] + 1.0);
          z += 0.5 * kTruncationStep * kGlW[k] * std::exp(-(p.value(along(sign * t)) - f0));
        }
        r[s] = hi;
      }
      for (int s = 0; s < 2; ++s) {
        if (done[s]) continue;
        const double sign = s == 0 ? 1.0 : -1.0;
        const Vec x = along(sign * r[s]);
        const double slope = sign * p.gradient(x)[a];
        if (slope <= 0.0) continue;
        const double tail = std::exp(-(p.value(x) - f0)) / slope / z;
        if (tail < side_tol) done[s] = true;
      }
    }
    box.hi[a] = r[0];
    box.lo[a] = -r[1];
  }
  return box;
}

Box support_box(const Measure& m) { return m.box(); }

double Quadrature::max_density() const {
  double top = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) top = std::max(top, mass[i] / grid->weight(i));
  return top;
}

QuadraturePtr discretize(const MeasurePtr& m, const GridPtr& grid) {
  if (grid->dimension() != m->dimension()) {
    throw Error(ErrorKind::invalid_dimension, "grid dimension differs from the measure's");
  }
  auto q = std::make_shared<Quadrature>();
  q->measure = m;
  q->grid = grid;
  q->mass.resize(grid->size());
  if (m->is_smooth()) {
    q->potential.resize(grid->size());
    const Potential& p = m->potential();
    parallel_chunks(grid->size(), 512, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double f = p.value(grid->point(i));
        q->potential[i] = f;
        q->mass[i] = grid->weight(i) * std::exp(-f - m->log_z());
      }
    });
    for (std::size_t i = 0; i < grid->size(); ++i) {
      if (!std::isfinite(q->mass[i])) {
        throw Error(ErrorKind::quadrature_failure, "non-finite node mass at node " + std::to_string(i));
      }
    }
  } else {
    const Axis& ax = grid->axis(0);
    for (std::size_t i = 0; i < ax.size(); ++i) {
      double mass = 0.0;
      const double x = ax.nodes[i];
      if (i > 0) {
        const double l = ax.nodes[i - 1];
        mass += (m->first_moment_between(l, x) - l * m->mass_between(l, x)) / (x - l);
      }
      if (i + 1 < ax.size()) {
        const double r = ax.nodes[i + 1];
        mass += (r * m->mass_between(x, r) - m->first_moment_between(x, r)) / (r - x);
      }
      q->mass[i] = mass;
    }
  }
  return q;
}

QuadraturePtr reference_quadrature(const PotentialPtr& p, std::size_t points_per_dim, double tail_tol) {
  return box_quadrature(p, choose_truncation(*p, tail_tol), points_per_dim);
}

QuadraturePtr box_quadrature(const PotentialPtr& p, const Box& box, std::size_t points_per_dim) {
  GridPtr grid = build_grid(box, points_per_dim);
  return discretize(normalize(p, *grid), grid);
}

QuadraturePtr piecewise_quadrature(const MeasurePtr& m, std::size_t points) {
  if (m->form() != MeasureForm::piecewise1d) {
    throw Error(ErrorKind::unsupported_form, "piecewise quadrature needs a piecewise measure");
  }
  GridPtr grid = build_grid(m->box(), points);
  return discretize(m, grid);
}

double integrate(std::span<const double> values, const Quadrature& q) {
  if (values.size() != q.size()) throw Error(ErrorKind::invalid_input, "field size differs from the grid");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    terms[i] = q.mass[i] * values[i];
    if (!std::isfinite(terms[i])) {
      throw Error(ErrorKind::quadrature_failure, "non-finite integrand at node " + std::to_string(i));
    }
  }
  return pairwise_sum(terms);
}

double integrate(const Field& f, const Quadrature& q) { return integrate(f.values, q); }

}  // namespace lcbl
