#pragma once

#include <vector>

#include "lcbl/constants.hpp"
#include "lcbl/inequalities.hpp"

namespace lcbl {

/// A joint measure on a uniform tensor grid split as x = (y, z): y is the
/// first `m` axes, z the rest. Slice k collects the nodes with y-index k.
struct SplitMeasure {
  QuadraturePtr q;
  int m = 1;
  std::size_t ny = 0;
  std::size_t nz = 0;
  GridPtr y_grid;
  /// nu(y_k): the joint mass of slice k.
  std::vector<double> slice_mass;

  std::size_t node(std::size_t k, std::size_t j) const { return k * nz + j; }
  /// Conditional weight of node j in slice k.
  double weight(std::size_t k, std::size_t j) const { return q->mass[node(k, j)] / slice_mass[k]; }
};

/// Throws degenerate-slice when a slice carries no mass.
SplitMeasure split_measure(const QuadraturePtr& q, int m);

struct ConditionalDecomposition {
  /// <h>_z(y_k).
  std::vector<double> mean;
  /// nu(y_k), summing to the joint mass.
  std::vector<double> nu;
};

ConditionalDecomposition conditional_decompose(const SplitMeasure& sm, const Field& h);

struct FisherOptions {
  double tol = kDefaultTolerance;
  /// Unit directions scanned for u when m = 2.
  std::size_t directions = 64;
};

/// Marginal Fisher information of <h>_z dnu against C times the joint Fisher
/// information of h dmu, C = 2 sup (lambda_max / lambda_min)^2. Sub-reports
/// carry the slice-wise checks "eig37" and "eig5" at their worst y-node.
InequalityReport verify_conditional_fisher(const SplitMeasure& sm, const TestFunction& h,
                                           const FisherOptions& opts = {});

/// Ratios |cov(x, h_M)| / int |h_M'| / f_M'' dmu for the spike potentials
/// f_M = M x^2 / 2 on |x| <= 1/M, linear outside, with h_M a C^1 ramp of
/// width 1/M.
ScanResult bl35_impossibility_scan(const std::vector<double>& m_values);

}  // namespace lcbl
