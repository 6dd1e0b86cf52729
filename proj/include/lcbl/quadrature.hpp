#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "lcbl/field.hpp"
#include "lcbl/grid.hpp"
#include "lcbl/measures.hpp"

namespace lcbl {

/// Box whose complement carries less than tail_tol of mass, judged from the
/// convexity tail bound of f restricted to each coordinate axis.
Box choose_truncation(const Potential& p, double tail_tol);
/// Exact support for piecewise measures; the working box for smooth ones.
Box support_box(const Measure& m);

class SpectralField;

/// A measure discretized on a grid: node masses m_i that sum to 1.
/// Smooth measures use w_i e^{-f(x_i) - logZ}; piecewise measures use the exact
/// integral of the density against the node's hat function.
struct Quadrature {
  MeasurePtr measure;
  GridPtr grid;
  std::vector<double> mass;
  /// f(x_i) for smooth measures (empty otherwise).
  std::vector<double> potential;
  /// Lazily computed Hessian spectrum (see spectrum_of).
  mutable std::shared_ptr<const SpectralField> spectral_cache;
  mutable std::shared_ptr<std::mutex> cache_mutex = std::make_shared<std::mutex>();

  int dimension() const noexcept { return grid->dimension(); }
  std::size_t size() const noexcept { return mass.size(); }
  double max_density() const;
};

using QuadraturePtr = std::shared_ptr<const Quadrature>;

QuadraturePtr discretize(const MeasurePtr& m, const GridPtr& grid);

/// Truncate, grid, normalize and discretize a potential in one step.
QuadraturePtr reference_quadrature(const PotentialPtr& p, std::size_t points_per_dim,
                                   double tail_tol = 1e-10);
/// Bounded box instead of a truncation search.
QuadraturePtr box_quadrature(const PotentialPtr& p, const Box& box, std::size_t points_per_dim);
QuadraturePtr piecewise_quadrature(const MeasurePtr& m, std::size_t points);

/// sum_i m_i v_i with pairwise summation.
double integrate(std::span<const double> values, const Quadrature& q);
double integrate(const Field& f, const Quadrature& q);

}  // namespace lcbl
