// AVX2 + FMA variants of the batched kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; the dispatcher calls in only after a
// runtime CPU check.

#include "tubeflow/kernels.hpp"

#if defined(TUBEFLOW_BUILD_AVX2)

#include <immintrin.h>

namespace tubeflow {
namespace kernels {

namespace {

inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d sum = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(sum, sum);
  return _mm_cvtsd_f64(_mm_add_sd(sum, shuf));
}

}  // namespace

void quadform_pair_batch_avx2(const double* qa, const double* qb, int m,
                              const double* w, int count, double* out_a,
                              double* out_b) {
  for (int i = 0; i < count; ++i) {
    const double* wi = w + static_cast<std::size_t>(i) * m;
    double acc_a = 0.0, acc_b = 0.0;
    for (int p = 0; p < m; ++p) {
      const double* qa_row = qa + static_cast<std::size_t>(p) * m;
      const double* qb_row = qb + static_cast<std::size_t>(p) * m;
      __m256d va = _mm256_setzero_pd();
      __m256d vb = _mm256_setzero_pd();
      int q = 0;
      for (; q + 4 <= m; q += 4) {
        __m256d wv = _mm256_loadu_pd(wi + q);
        va = _mm256_fmadd_pd(_mm256_loadu_pd(qa_row + q), wv, va);
        vb = _mm256_fmadd_pd(_mm256_loadu_pd(qb_row + q), wv, vb);
      }
      double row_a = hsum256(va);
      double row_b = hsum256(vb);
      for (; q < m; ++q) {
        row_a += qa_row[q] * wi[q];
        row_b += qb_row[q] * wi[q];
      }
      acc_a += wi[p] * row_a;
      acc_b += wi[p] * row_b;
    }
    out_a[i] = acc_a;
    out_b[i] = acc_b;
  }
}

void cone_rate_batch_avx2(const double* K, int r, int d, const double* xi,
                          const double* eta, int count, double* rate,
                          double* center_mass) {
  int i = 0;
  for (; i + 4 <= count; i += 4) {
    const double* x[4];
    const double* e[4];
    for (int k = 0; k < 4; ++k) {
      x[k] = xi + static_cast<std::size_t>(i + k) * d;
      e[k] = eta + static_cast<std::size_t>(i + k) * d;
    }
    __m256d u = _mm256_setzero_pd();
    __m256d up = _mm256_setzero_pd();
    __m256d nn = _mm256_setzero_pd();
    __m256d xe = _mm256_setzero_pd();
    __m256d ekx = _mm256_setzero_pd();
    for (int c = 0; c < d; ++c) {
      __m256d xc = _mm256_set_pd(x[3][c], x[2][c], x[1][c], x[0][c]);
      __m256d ec = _mm256_set_pd(e[3][c], e[2][c], e[1][c], e[0][c]);
      const double* krow = K + static_cast<std::size_t>(c) * d;
      __m256d kc = _mm256_setzero_pd();
      for (int q = 0; q < d; ++q) {
        __m256d xq = _mm256_set_pd(x[3][q], x[2][q], x[1][q], x[0][q]);
        kc = _mm256_fmadd_pd(_mm256_set1_pd(krow[q]), xq, kc);
      }
      nn = _mm256_fmadd_pd(xc, xc, nn);
      nn = _mm256_fmadd_pd(ec, ec, nn);
      xe = _mm256_fmadd_pd(xc, ec, xe);
      ekx = _mm256_fmadd_pd(ec, kc, ekx);
      if (c < r) {
        __m256d a = _mm256_add_pd(xc, ec);
        u = _mm256_fmadd_pd(a, a, u);
        __m256d da = _mm256_sub_pd(ec, kc);
        up = _mm256_fmadd_pd(_mm256_mul_pd(a, _mm256_set1_pd(2.0)), da, up);
      }
    }
    __m256d np =
        _mm256_mul_pd(_mm256_sub_pd(xe, ekx), _mm256_set1_pd(2.0));
    __m256d num = _mm256_sub_pd(_mm256_mul_pd(up, nn), _mm256_mul_pd(u, np));
    __m256d den =
        _mm256_mul_pd(_mm256_mul_pd(nn, nn), _mm256_set1_pd(2.0));
    _mm256_storeu_pd(rate + i, _mm256_div_pd(num, den));
    _mm256_storeu_pd(center_mass + i, u);
  }
  if (i < count) {
    cone_rate_batch_scalar(K, r, d, xi + static_cast<std::size_t>(i) * d,
                           eta + static_cast<std::size_t>(i) * d, count - i,
                           rate + i, center_mass + i);
  }
}

}  // namespace kernels
}  // namespace tubeflow

#endif  // TUBEFLOW_BUILD_AVX2
