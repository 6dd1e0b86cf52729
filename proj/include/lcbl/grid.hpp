#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lcbl/linalg.hpp"

namespace lcbl {

/// Axis-aligned box [lo_i, hi_i].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dimension() const noexcept { return static_cast<int>(lo.size()); }
  double width(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(std::span<const double> x) const;
  static Box cube(int n, double half_width);
};

enum class QuadratureRule { trapezoid, gauss_legendre };

/// One tensor factor of a grid. `uniform` axes carry an equal node spacing and
/// support finite-difference stencils; Gauss-Legendre axes do not.
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  bool uniform = false;
  double spacing = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
};

Axis trapezoid_axis(double lo, double hi, std::size_t nodes);
/// Composite Gauss-Legendre: `panels` equal panels with `order` nodes each.
Axis gauss_legendre_axis(double lo, double hi, std::size_t panels, std::size_t order);
/// Trapezoid rule on an arbitrary ascending node list.
Axis trapezoid_axis_from_nodes(std::vector<double> nodes);

/// Tensor-product grid. Nodes are enumerated with the last axis fastest.
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  int dimension() const noexcept { return static_cast<int>(axes_.size()); }
  std::size_t size() const noexcept { return size_; }
  const Axis& axis(int a) const { return axes_[a]; }
  std::size_t stride(int a) const { return strides_[a]; }
  std::size_t index_along(std::size_t node, int a) const { return (node / strides_[a]) % axes_[a].size(); }
  double coordinate(std::size_t node, int a) const { return axes_[a].nodes[index_along(node, a)]; }
  double weight(std::size_t node) const { return weights_[node]; }
  std::span<const double> weights() const noexcept { return weights_; }
  Vec point(std::size_t node) const;
  bool uniform() const noexcept;
  Box bounds() const;
  /// Structure-of-arrays copy of the node coordinates, one array per axis.
  std::vector<std::vector<double>> coordinates_soa() const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> weights_;
  std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

inline constexpr std::size_t kMinNodesPerAxis = 16;
inline constexpr std::size_t kMaxGridNodes = 10'000'000;

/// Budget-checked grid construction. Trapezoid grids nest under 2x refinement
/// when `points_per_dim - 1` doubles.
GridPtr build_grid(const Box& bounds, std::size_t points_per_dim,
                   QuadratureRule rule = QuadratureRule::trapezoid,
                   std::size_t max_nodes = kMaxGridNodes);

/// Scalar values laid out in grid order.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// `components` values per node, node-major.
struct VectorField {
  GridPtr grid;
  int components = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t node) const {
    return {values.data() + node * components, static_cast<std::size_t>(components)};
  }
  std::span<double> at(std::size_t node) {
    return {values.data() + node * components, static_cast<std::size_t>(components)};
  }
  Field component(int c) const;
};

/// Throws quadrature-failure naming the first non-finite entry.
void require_finite(const Field& f, const char* what);

}  // namespace lcbl
