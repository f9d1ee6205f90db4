#include "kernels_internal.hpp"

namespace chirp::kernels::detail {

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                 const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    cplx* cj = c + j * ldc;
    for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx blj = b[l + j * ldb];
      const cplx* al = a + l * lda;
      const double br = blj.real();
      const double bi = blj.imag();
      for (std::size_t i = 0; i < m; ++i) {
        const double ar = al[i].real();
        const double ai = al[i].imag();
        cj[i] += cplx(ar * br - ai * bi, ai * br + ar * bi);
      }
    }
  }
}

void scale_rows_scalar(std::size_t m, std::size_t n, const cplx* s, const cplx* x, std::size_t ldx,
                       cplx* y, std::size_t ldy) {
  for (std::size_t j = 0; j < n; ++j) {
    const cplx* xj = x + j * ldx;
    cplx* yj = y + j * ldy;
    for (std::size_t i = 0; i < m; ++i) {
      const double sr = s[i].real();
      const double si = s[i].imag();
      const double xr = xj[i].real();
      const double xi = xj[i].imag();
      yj[i] = cplx(sr * xr - si * xi, si * xr + sr * xi);
    }
  }
}

double weighted_norm2_scalar(std::size_t m, std::size_t n, const double* w, const cplx* z,
                             std::size_t ldz) {
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx* zj = z + j * ldz;
    for (std::size_t i = 0; i < m; ++i) {
      total += w[i] * (zj[i].real() * zj[i].real() + zj[i].imag() * zj[i].imag());
    }
  }
  return total;
}

}  // namespace chirp::kernels::detail
