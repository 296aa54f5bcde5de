// Compiled with -mavx2 -mfma; only entered after a cpuid check.
#include <immintrin.h>

#include <vector>

#include "rectfree/kernels.hpp"

namespace rectfree::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

ResolventSums resolvent_sums_avx2(const double* s, const double* p, std::size_t n,
                                  std::complex<double> u) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ur = _mm256_set1_pd(u.real());
  const __m256d neg_ui = _mm256_set1_pd(-u.imag());
  __m256d vr = _mm256_setzero_pd(), vi = _mm256_setzero_pd();
  __m256d dr = _mm256_setzero_pd(), di = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sv = _mm256_loadu_pd(s + i);
    const __m256d pv = _mm256_loadu_pd(p + i);
    const __m256d ar = _mm256_fnmadd_pd(sv, ur, one);
    const __m256d ai = _mm256_mul_pd(sv, neg_ui);
    const __m256d norm = _mm256_fmadd_pd(ar, ar, _mm256_mul_pd(ai, ai));
    const __m256d inv = _mm256_div_pd(one, norm);
    const __m256d rr = _mm256_mul_pd(ar, inv);
    const __m256d ri = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), ai), inv);
    vr = _mm256_fmadd_pd(pv, rr, vr);
    vi = _mm256_fmadd_pd(pv, ri, vi);
    const __m256d ps = _mm256_mul_pd(pv, sv);
    const __m256d sq_r = _mm256_fmsub_pd(rr, rr, _mm256_mul_pd(ri, ri));
    const __m256d sq_i = _mm256_mul_pd(two, _mm256_mul_pd(rr, ri));
    dr = _mm256_fmadd_pd(ps, sq_r, dr);
    di = _mm256_fmadd_pd(ps, sq_i, di);
  }
  ResolventSums tail = resolvent_sums_scalar(s + i, p + i, n - i, u);
  return {{hsum(vr) + tail.value.real(), hsum(vi) + tail.value.imag()},
          {hsum(dr) + tail.derivative.real(), hsum(di) + tail.derivative.imag()}};
}

void power_sums_avx2(const double* s, const double* p, std::size_t n, double* out,
                     std::size_t k_max) {
  std::vector<double> acc(4 * k_max, 0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sv = _mm256_loadu_pd(s + i);
    __m256d t = _mm256_loadu_pd(p + i);
    for (std::size_t k = 0; k < k_max; ++k) {
      t = _mm256_mul_pd(t, sv);
      _mm256_storeu_pd(&acc[4 * k], _mm256_add_pd(_mm256_loadu_pd(&acc[4 * k]), t));
    }
  }
  std::vector<double> tail(k_max);
  power_sums_scalar(s + i, p + i, n - i, tail.data(), k_max);
  for (std::size_t k = 0; k < k_max; ++k) out[k] = hsum(_mm256_loadu_pd(&acc[4 * k])) + tail[k];
}

}  // namespace rectfree::kernels::detail
