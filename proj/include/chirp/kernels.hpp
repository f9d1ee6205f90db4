#pragma once

// Data-parallel inner loops of the simulator. Each kernel has a scalar
// reference implementation; an AVX2+FMA variant is compiled into a separate
// translation unit and selected at runtime when the CPU supports it.
//
// All matrices are column-major with explicit leading dimensions, which is
// the layout of Eigen's default dynamic matrices.

#include <complex>
#include <cstddef>
#include <string_view>

namespace chirp::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;

  /// c (m x n) = a (m x k) * b (k x n).
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
               const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);

  /// y(i, j) = s[i] * x(i, j) for an m x n block.
  void (*scale_rows)(std::size_t m, std::size_t n, const cplx* s, const cplx* x, std::size_t ldx,
                     cplx* y, std::size_t ldy);

  /// sum_i w[i] * sum_j |z(i, j)|^2 for an m x n block.
  double (*weighted_norm2)(std::size_t m, std::size_t n, const double* w, const cplx* z,
                           std::size_t ldz);
};

const KernelTable& scalar_kernels();

/// nullptr when AVX2 is not compiled in or the running CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernel table used by the library. Defaults to the best supported variant;
/// the CHIRP_KERNELS environment variable ("scalar", "avx2", "auto") overrides.
const KernelTable& active();

/// Force a variant by name. Returns false if the name is unknown or unsupported.
bool select(std::string_view name);

}  // namespace chirp::kernels
