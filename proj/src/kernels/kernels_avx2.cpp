// Compiled with -mavx2 -mfma. Nothing here may be called unless dispatch has
// confirmed CPU support at runtime.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace chirp::kernels::detail {

namespace {

// Two interleaved complex doubles per register: (re0, im0, re1, im1).
inline __m256d cmul(__m256d a, __m256d b_re, __m256d b_im) {
  const __m256d a_swap = _mm256_permute_pd(a, 0b0101);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
               const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
  const std::size_t m2 = m & ~std::size_t{1};
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = reinterpret_cast<double*>(c + j * ldc);
    for (std::size_t i = 0; i < 2 * m; ++i) cj[i] = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx blj = b[l + j * ldb];
      const __m256d br = _mm256_set1_pd(blj.real());
      const __m256d bi = _mm256_set1_pd(blj.imag());
      const double* al = reinterpret_cast<const double*>(a + l * lda);
      std::size_t i = 0;
      for (; i < m2; i += 2) {
        const __m256d av = _mm256_loadu_pd(al + 2 * i);
        const __m256d cv = _mm256_loadu_pd(cj + 2 * i);
        _mm256_storeu_pd(cj + 2 * i, _mm256_add_pd(cv, cmul(av, br, bi)));
      }
      if (i < m) {
        const double ar = al[2 * i];
        const double ai = al[2 * i + 1];
        cj[2 * i] += ar * blj.real() - ai * blj.imag();
        cj[2 * i + 1] += ai * blj.real() + ar * blj.imag();
      }
    }
  }
}

void scale_rows_avx2(std::size_t m, std::size_t n, const cplx* s, const cplx* x, std::size_t ldx,
                     cplx* y, std::size_t ldy) {
  const std::size_t m2 = m & ~std::size_t{1};
  const double* sd = reinterpret_cast<const double*>(s);
  for (std::size_t j = 0; j < n; ++j) {
    const double* xj = reinterpret_cast<const double*>(x + j * ldx);
    double* yj = reinterpret_cast<double*>(y + j * ldy);
    std::size_t i = 0;
    for (; i < m2; i += 2) {
      const __m256d sv = _mm256_loadu_pd(sd + 2 * i);
      const __m256d s_re = _mm256_movedup_pd(sv);
      const __m256d s_im = _mm256_permute_pd(sv, 0b1111);
      _mm256_storeu_pd(yj + 2 * i, cmul(_mm256_loadu_pd(xj + 2 * i), s_re, s_im));
    }
    if (i < m) {
      const double sr = sd[2 * i];
      const double si = sd[2 * i + 1];
      const double xr = xj[2 * i];
      const double xi = xj[2 * i + 1];
      yj[2 * i] = sr * xr - si * xi;
      yj[2 * i + 1] = si * xr + sr * xi;
    }
  }
}

double weighted_norm2_avx2(std::size_t m, std::size_t n, const double* w, const cplx* z,
                           std::size_t ldz) {
  const std::size_t m2 = m & ~std::size_t{1};
  __m256d acc = _mm256_setzero_pd();
  double tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double* zj = reinterpret_cast<const double*>(z + j * ldz);
    std::size_t i = 0;
    for (; i < m2; i += 2) {
      const __m256d wv = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
      const __m256d zv = _mm256_loadu_pd(zj + 2 * i);
      acc = _mm256_fmadd_pd(_mm256_mul_pd(zv, zv), wv, acc);
    }
    if (i < m) tail += w[i] * (zj[2 * i] * zj[2 * i] + zj[2 * i + 1] * zj[2 * i + 1]);
  }
  return hsum(acc) + tail;
}

}  // namespace chirp::kernels::detail
