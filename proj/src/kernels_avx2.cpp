/**
 * @file kernels_avx2.cpp
 * @brief AVX2 kernels, four candidates per vector. Operation order matches the
 * scalar reference exactly (no FMA), so results are bit-identical.
 */
#include "miso/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define MISO_HAVE_AVX2_KERNELS 1
#endif

namespace miso::kernels::avx2 {

#ifdef MISO_HAVE_AVX2_KERNELS

void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out) {
  std::size_t k = 0;
  for (; k + 4 <= b.n; k += 4) {
    const __m256d qr = _mm256_loadu_pd(b.q_re + k);
    const __m256d qi = _mm256_loadu_pd(b.q_im + k);
    __m256d acc = _mm256_setzero_pd();
    for (int t = 0; t < b.T; ++t) {
      const __m256d cr = _mm256_set1_pd(b.col_re[t]);
      const __m256d ci = _mm256_set1_pd(b.col_im[t]);
      const __m256d er = _mm256_add_pd(_mm256_set1_pd(b.base_re[t]),
                                       _mm256_sub_pd(_mm256_mul_pd(cr, qr), _mm256_mul_pd(ci, qi)));
      const __m256d ei = _mm256_add_pd(_mm256_set1_pd(b.base_im[t]),
                                       _mm256_add_pd(_mm256_mul_pd(cr, qi), _mm256_mul_pd(ci, qr)));
      const __m256d dr = _mm256_sub_pd(_mm256_set1_pd(y_re[t]), er);
      const __m256d di = _mm256_sub_pd(_mm256_set1_pd(y_im[t]), ei);
      const __m256d e2 = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[t]), e2));
    }
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < b.n) {
    Batch tail = b;
    tail.q_re += k;
    tail.q_im += k;
    tail.n -= k;
    scalar::weighted_metric(tail, y_re, y_im, w, out + k);
  }
}

void product_norm(const Batch& b, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= b.n; k += 4) {
    const __m256d qr = _mm256_loadu_pd(b.q_re + k);
    const __m256d qi = _mm256_loadu_pd(b.q_im + k);
    __m256d p = _mm256_set1_pd(1.0);
    for (int t = 0; t < b.T; ++t) {
      const __m256d cr = _mm256_set1_pd(b.col_re[t]);
      const __m256d ci = _mm256_set1_pd(b.col_im[t]);
      const __m256d er = _mm256_add_pd(_mm256_set1_pd(b.base_re[t]),
                                       _mm256_sub_pd(_mm256_mul_pd(cr, qr), _mm256_mul_pd(ci, qi)));
      const __m256d ei = _mm256_add_pd(_mm256_set1_pd(b.base_im[t]),
                                       _mm256_add_pd(_mm256_mul_pd(cr, qi), _mm256_mul_pd(ci, qr)));
      p = _mm256_mul_pd(p, _mm256_add_pd(_mm256_mul_pd(er, er), _mm256_mul_pd(ei, ei)));
    }
    _mm256_storeu_pd(out + k, p);
  }
  if (k < b.n) {
    Batch tail = b;
    tail.q_re += k;
    tail.q_im += k;
    tail.n -= k;
    scalar::product_norm(tail, out + k);
  }
}

#else

void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out) {
  scalar::weighted_metric(b, y_re, y_im, w, out);
}

void product_norm(const Batch& b, double* out) { scalar::product_norm(b, out); }

#endif

}  // namespace miso::kernels::avx2
