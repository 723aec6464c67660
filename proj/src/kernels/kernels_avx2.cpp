#include <immintrin.h>

#include "cwe/kernels.hpp"

namespace cwe::kernels::avx2 {

namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void affine_samples(double offset, std::span<const double> weights, const double* columns,
                    std::size_t column_stride, std::span<double> out) noexcept {
  const std::size_t n = out.size();
  const std::size_t m = weights.size();
  double* dst = out.data();
  const __m256d voffset = _mm256_set1_pd(offset);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = voffset;
    for (std::size_t j = 0; j < m; ++j) {
      const __m256d w = _mm256_set1_pd(weights[j]);
      const __m256d c = _mm256_loadu_pd(columns + j * column_stride + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, c));
    }
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < n; ++i) {
    double acc = offset;
    for (std::size_t j = 0; j < m; ++j) acc = acc + weights[j] * columns[j * column_stride + i];
    dst[i] = acc;
  }
}

double positive_part_sum(std::span<const double> z, double t) noexcept {
  const std::size_t n = z.size();
  const double* src = z.data();
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc0 = zero;
  __m256d acc1 = zero;

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(src + i), vt);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(src + i + 4), vt);
    acc0 = _mm256_add_pd(acc0, _mm256_max_pd(d0, zero));
    acc1 = _mm256_add_pd(acc1, _mm256_max_pd(d1, zero));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(src + i), vt);
    acc0 = _mm256_add_pd(acc0, _mm256_max_pd(d, zero));
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = src[i] - t;
    if (d > 0.0) acc += d;
  }
  return acc;
}

double sum(std::span<const double> z) noexcept {
  const std::size_t n = z.size();
  const double* src = z.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(src + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(src + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(src + i));
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += src[i];
  return acc;
}

}  // namespace cwe::kernels::avx2
