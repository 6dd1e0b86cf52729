#include <cmath>

#include "lcbl/kernels.hpp"

namespace lcbl {

namespace {

double divdiff_row(const PointSet& pts, const double* xi, double hi, const double* h, const double* w,
                   std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    double d2 = 0.0;
    for (int a = 0; a < pts.dimension; ++a) {
      const double d = pts.coords[a][j] - xi[a];
      d2 += d * d;
    }
    acc += w[j] * std::abs(hi - h[j]) / std::sqrt(d2);
  }
  return acc;
}

double inverse_distance_row(const PointSet& pts, const double* xi, const double* w, std::size_t begin,
                            std::size_t end) {
  double acc = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    double d2 = 0.0;
    for (int a = 0; a < pts.dimension; ++a) {
      const double d = pts.coords[a][j] - xi[a];
      d2 += d * d;
    }
    acc += w[j] / std::sqrt(d2);
  }
  return acc;
}

double pair_covariance_row(double gi, double hi, const double* g, const double* h, const double* w,
                           std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t j = begin; j < end; ++j) acc += w[j] * (gi - g[j]) * (hi - h[j]);
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", divdiff_row, inverse_distance_row, pair_covariance_row};
  return table;
}

}  // namespace lcbl
