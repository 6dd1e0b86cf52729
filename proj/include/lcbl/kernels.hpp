#pragma once

#include <cstddef>
#include <string_view>

namespace lcbl {

/// Coordinates in structure-of-arrays form: coords[a][j] is axis a of point j.
struct PointSet {
  int dimension = 0;
  const double* const* coords = nullptr;
  std::size_t size = 0;
};

/// Inner loops over point pairs. Every entry sums over j in [begin, end).
struct KernelTable {
  std::string_view name;
  /// sum_j w_j |hi - h_j| / |xi - x_j|. Callers exclude j with x_j = xi.
  double (*divdiff_row)(const PointSet& pts, const double* xi, double hi, const double* h,
                        const double* w, std::size_t begin, std::size_t end);
  /// sum_j w_j / |xi - x_j|.
  double (*inverse_distance_row)(const PointSet& pts, const double* xi, const double* w,
                                 std::size_t begin, std::size_t end);
  /// sum_j w_j (gi - g_j)(hi - h_j).
  double (*pair_covariance_row)(double gi, double hi, const double* g, const double* h,
                                const double* w, std::size_t begin, std::size_t end);
};

const KernelTable& scalar_kernels();
/// nullptr when the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();
/// AVX2 when available unless LCBL_SIMD=scalar.
const KernelTable& active_kernels();

}  // namespace lcbl
