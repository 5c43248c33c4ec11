// SPDX-License-Identifier: Apache-2.0

#include <immintrin.h>

#include "sensreg/kernels.hpp"

namespace sensreg::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void compensate(const CompensationBatch& in, std::span<double> gx, std::span<double> gy) {
  const std::size_t n = in.size();
  const __m256d inv_lambda = _mm256_set1_pd(in.inv_lambda);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d r = _mm256_mul_pd(
        _mm256_add_pd(_mm256_loadu_pd(&in.range[k]), _mm256_loadu_pd(&in.range_bias[k])), inv_lambda);
    const __m256d ca = _mm256_loadu_pd(&in.cos_az[k]);
    const __m256d sa = _mm256_loadu_pd(&in.sin_az[k]);
    const __m256d cb = _mm256_loadu_pd(&in.cos_bias[k]);
    const __m256d sb = _mm256_loadu_pd(&in.sin_bias[k]);
    const __m256d c = _mm256_fmsub_pd(ca, cb, _mm256_mul_pd(sa, sb));
    const __m256d s = _mm256_fmadd_pd(sa, cb, _mm256_mul_pd(ca, sb));
    _mm256_storeu_pd(&gx[k], _mm256_fmadd_pd(r, c, _mm256_loadu_pd(&in.sensor_x[k])));
    _mm256_storeu_pd(&gy[k], _mm256_fmadd_pd(r, s, _mm256_loadu_pd(&in.sensor_y[k])));
  }
  if (k < n) {
    CompensationBatch tail{in.range.subspan(k),      in.cos_az.subspan(k),   in.sin_az.subspan(k),
                           in.range_bias.subspan(k), in.cos_bias.subspan(k), in.sin_bias.subspan(k),
                           in.sensor_x.subspan(k),   in.sensor_y.subspan(k), in.inv_lambda};
    scalar::compensate(tail, gx.subspan(k), gy.subspan(k));
  }
}

double increment_residual_sq(std::span<const double> gx, std::span<const double> gy, std::span<const double> t,
                             double vx, double vy) {
  const std::size_t n = gx.size();
  if (n < 2) return 0.0;
  const std::size_t pairs = n - 1;
  const __m256d vvx = _mm256_set1_pd(vx);
  const __m256d vvy = _mm256_set1_pd(vy);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= pairs; k += 4) {
    const __m256d T = _mm256_sub_pd(_mm256_loadu_pd(&t[k + 1]), _mm256_loadu_pd(&t[k]));
    const __m256d ex = _mm256_fnmadd_pd(T, vvx, _mm256_sub_pd(_mm256_loadu_pd(&gx[k + 1]), _mm256_loadu_pd(&gx[k])));
    const __m256d ey = _mm256_fnmadd_pd(T, vvy, _mm256_sub_pd(_mm256_loadu_pd(&gy[k + 1]), _mm256_loadu_pd(&gy[k])));
    acc = _mm256_fmadd_pd(ex, ex, acc);
    acc = _mm256_fmadd_pd(ey, ey, acc);
  }
  double total = hsum(acc);
  if (k < pairs) total += scalar::increment_residual_sq(gx.subspan(k), gy.subspan(k), t.subspan(k), vx, vy);
  return total;
}

}  // namespace sensreg::kernels::avx2
