#include <immintrin.h>

#include <cmath>

#include "lcbl/kernels.hpp"

namespace lcbl {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d squared_distance(const PointSet& pts, const double* xi, std::size_t j) {
  __m256d d2 = _mm256_setzero_pd();
  for (int a = 0; a < pts.dimension; ++a) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pts.coords[a] + j), _mm256_set1_pd(xi[a]));
    d2 = _mm256_fmadd_pd(d, d, d2);
  }
  return d2;
}

inline double squared_distance_scalar(const PointSet& pts, const double* xi, std::size_t j) {
  double d2 = 0.0;
  for (int a = 0; a < pts.dimension; ++a) {
    const double d = pts.coords[a][j] - xi[a];
    d2 += d * d;
  }
  return d2;
}

double divdiff_row(const PointSet& pts, const double* xi, double hi, const double* h, const double* w,
                   std::size_t begin, std::size_t end) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d hv = _mm256_set1_pd(hi);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dist = _mm256_sqrt_pd(squared_distance(pts, xi, j));
    const __m256d diff = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(hv, _mm256_loadu_pd(h + j)));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j), diff), dist));
  }
  double tail = 0.0;
  for (; j < end; ++j) tail += w[j] * std::abs(hi - h[j]) / std::sqrt(squared_distance_scalar(pts, xi, j));
  return hsum(acc) + tail;
}

double inverse_distance_row(const PointSet& pts, const double* xi, const double* w, std::size_t begin,
                            std::size_t end) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dist = _mm256_sqrt_pd(squared_distance(pts, xi, j));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(w + j), dist));
  }
  double tail = 0.0;
  for (; j < end; ++j) tail += w[j] / std::sqrt(squared_distance_scalar(pts, xi, j));
  return hsum(acc) + tail;
}

double pair_covariance_row(double gi, double hi, const double* g, const double* h, const double* w,
                           std::size_t begin, std::size_t end) {
  const __m256d gv = _mm256_set1_pd(gi);
  const __m256d hv = _mm256_set1_pd(hi);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dg = _mm256_sub_pd(gv, _mm256_loadu_pd(g + j));
    const __m256d dh = _mm256_sub_pd(hv, _mm256_loadu_pd(h + j));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j), dg), dh, acc);
  }
  double tail = 0.0;
  for (; j < end; ++j) tail += w[j] * (gi - g[j]) * (hi - h[j]);
  return hsum(acc) + tail;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", divdiff_row, inverse_distance_row, pair_covariance_row};
  return table;
}

}  // namespace lcbl
