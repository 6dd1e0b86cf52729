#include "lcbl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lcbl/error.hpp"

namespace lcbl {

bool Box::contains(std::span<const double> x) const {
  for (int a = 0; a < dimension(); ++a) {
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  }
  return true;
}

Box Box::cube(int n, double half_width) {
  return {std::vector<double>(n, -half_width), std::vector<double>(n, half_width)};
}

namespace {

// Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre_reference(std::size_t order, std::vector<double>& x, std::vector<double>& w) {
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = w[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

Axis trapezoid_axis(double lo, double hi, std::size_t nodes) {
  if (nodes < 2 || !(hi > lo)) {
    throw Error(ErrorKind::invalid_input, "trapezoid axis needs >= 2 nodes and lo < hi");
  }
  Axis axis;
  axis.lo = lo;
  axis.hi = hi;
  axis.uniform = true;
  axis.spacing = (hi - lo) / static_cast<double>(nodes - 1);
  axis.nodes.resize(nodes);
  axis.weights.assign(nodes, axis.spacing);
  for (std::size_t i = 0; i < nodes; ++i) axis.nodes[i] = lo + axis.spacing * static_cast<double>(i);
  axis.nodes.back() = hi;
  axis.weights.front() = axis.weights.back() = 0.5 * axis.spacing;
  return axis;
}

Axis gauss_legendre_axis(double lo, double hi, std::size_t panels, std::size_t order) {
  if (panels == 0 || order == 0 || !(hi > lo)) {
    throw Error(ErrorKind::invalid_input, "Gauss-Legendre axis needs panels, order > 0 and lo < hi");
  }
  std::vector<double> rx, rw;
  gauss_legendre_reference(order, rx, rw);
  Axis axis;
  axis.lo = lo;
  axis.hi = hi;
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    for (std::size_t k = 0; k < order; ++k) {
      axis.nodes.push_back(a + 0.5 * width * (rx[k] + 1.0));
      axis.weights.push_back(0.5 * width * rw[k]);
    }
  }
  return axis;
}

Axis trapezoid_axis_from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw Error(ErrorKind::invalid_input, "axis needs >= 2 nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw Error(ErrorKind::invalid_input, "axis nodes must ascend");
  }
  Axis axis;
  axis.lo = nodes.front();
  axis.hi = nodes.back();
  axis.weights.assign(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    axis.weights[i] += 0.5 * h;
    axis.weights[i + 1] += 0.5 * h;
  }
  axis.nodes = std::move(nodes);
  return axis;
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error(ErrorKind::invalid_dimension, "grid needs at least one axis");
  const int n = dimension();
  strides_.assign(n, 1);
  size_ = 1;
  for (int a = n - 1; a >= 0; --a) {
    strides_[a] = size_;
    size_ *= axes_[a].size();
  }
  weights_.assign(size_, 1.0);
  for (std::size_t i = 0; i < size_; ++i) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) w *= axes_[a].weights[index_along(i, a)];
    weights_[i] = w;
  }
}

Vec Grid::point(std::size_t node) const {
  Vec x(dimension());
  for (int a = 0; a < dimension(); ++a) x[a] = coordinate(node, a);
  return x;
}

bool Grid::uniform() const noexcept {
  for (const auto& a : axes_) {
    if (!a.uniform) return false;
  }
  return true;
}

Box Grid::bounds() const {
  Box b;
  for (const auto& a : axes_) {
    b.lo.push_back(a.lo);
    b.hi.push_back(a.hi);
  }
  return b;
}

std::vector<std::vector<double>> Grid::coordinates_soa() const {
  std::vector<std::vector<double>> soa(dimension(), std::vector<double>(size_));
  for (std::size_t i = 0; i < size_; ++i) {
    for (int a = 0; a < dimension(); ++a) soa[a][i] = coordinate(i, a);
  }
  return soa;
}

GridPtr build_grid(const Box& bounds, std::size_t points_per_dim, QuadratureRule rule,
                   std::size_t max_nodes) {
  const int n = bounds.dimension();
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "grid dimension must be >= 1");
  if (points_per_dim < kMinNodesPerAxis) {
    throw Error(ErrorKind::invalid_input,
                "points_per_dim must be >= " + std::to_string(kMinNodesPerAxis));
  }
  const double total = std::pow(static_cast<double>(points_per_dim), n);
  if (total > static_cast<double>(max_nodes)) {
    throw Error(ErrorKind::budget_exceeded,
                "grid of " + std::to_string(points_per_dim) + "^" + std::to_string(n) +
                    " nodes exceeds the node budget; lower the dimension or the points per axis");
  }
  std::vector<Axis> axes;
  for (int a = 0; a < n; ++a) {
    if (rule == QuadratureRule::trapezoid) {
      axes.push_back(trapezoid_axis(bounds.lo[a], bounds.hi[a], points_per_dim));
    } else {
      // 4-point panels; node count rounded up to a multiple of 4.
      const std::size_t panels = (points_per_dim + 3) / 4;
      axes.push_back(gauss_legendre_axis(bounds.lo[a], bounds.hi[a], panels, 4));
    }
  }
  return std::make_shared<const Grid>(std::move(axes));
}

Field VectorField::component(int c) const {
  Field f{grid, std::vector<double>(values.size() / components)};
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = values[i * components + c];
  return f;
}

void require_finite(const Field& f, const char* what) {
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!std::isfinite(f.values[i])) {
      throw Error(ErrorKind::quadrature_failure,
                  std::string(what) + ": non-finite value at node " + std::to_string(i));
    }
  }
}

}  // namespace lcbl
