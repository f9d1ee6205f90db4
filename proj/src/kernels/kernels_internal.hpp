#pragma once

#include "chirp/kernels.hpp"

namespace chirp::kernels::detail {

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                 const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
void scale_rows_scalar(std::size_t m, std::size_t n, const cplx* s, const cplx* x, std::size_t ldx,
                       cplx* y, std::size_t ldy);
double weighted_norm2_scalar(std::size_t m, std::size_t n, const double* w, const cplx* z,
                             std::size_t ldz);

#if defined(CHIRP_HAVE_AVX2)
void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
               const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
void scale_rows_avx2(std::size_t m, std::size_t n, const cplx* s, const cplx* x, std::size_t ldx,
                     cplx* y, std::size_t ldy);
double weighted_norm2_avx2(std::size_t m, std::size_t n, const double* w, const cplx* z,
                           std::size_t ldz);
#endif

}  // namespace chirp::kernels::detail
