#include <doctest.h>

#include <random>
#include <vector>

#include "chirp/kernels.hpp"
#include "chirp/quantum_core.hpp"

using namespace chirp;

namespace {

std::vector<kernels::cplx> random_block(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<kernels::cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

// Naive triple loop, independent of both kernel variants.
std::vector<kernels::cplx> naive_gemm(std::size_t m, std::size_t n, std::size_t k,
                                      const std::vector<kernels::cplx>& a, std::size_t lda,
                                      const std::vector<kernels::cplx>& b, std::size_t ldb) {
  std::vector<kernels::cplx> c(m * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      kernels::cplx acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i + p * lda] * b[p + j * ldb];
      c[i + j * m] = acc;
    }
  return c;
}

std::vector<const kernels::KernelTable*> variants() {
  std::vector<const kernels::KernelTable*> v{&kernels::scalar_kernels()};
  if (const auto* avx = kernels::avx2_kernels()) v.push_back(avx);
  return v;
}

}  // namespace

TEST_CASE("gemm variants match a naive product on ragged shapes") {
  std::mt19937_64 rng(7);
  for (const auto* kt : variants()) {
    CAPTURE(kt->name);
    for (std::size_t m : {1u, 2u, 3u, 5u, 9u, 36u}) {
      for (std::size_t n : {1u, 3u, 4u, 7u}) {
        for (std::size_t k : {1u, 2u, 6u, 13u}) {
          const std::size_t lda = m + 1, ldb = k + 2;
          const auto a = random_block(lda * k, rng);
          const auto b = random_block(ldb * n, rng);
          std::vector<kernels::cplx> c(m * n, {99.0, 99.0});
          kt->gemm(m, n, k, a.data(), lda, b.data(), ldb, c.data(), m);
          const auto ref = naive_gemm(m, n, k, a, lda, b, ldb);
          for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - ref[i]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("scale_rows and weighted_norm2 agree across variants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& scalar = kernels::scalar_kernels();
  for (const auto* kt : variants()) {
    CAPTURE(kt->name);
    for (std::size_t m : {1u, 2u, 3u, 7u, 12u, 36u}) {
      for (std::size_t n : {1u, 2u, 5u}) {
        const std::size_t ld = m + 3;
        const auto s = random_block(m, rng);
        const auto x = random_block(ld * n, rng);
        std::vector<kernels::cplx> y(ld * n), y_ref(ld * n);
        kt->scale_rows(m, n, s.data(), x.data(), ld, y.data(), ld);
        scalar.scale_rows(m, n, s.data(), x.data(), ld, y_ref.data(), ld);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::abs(y[i + j * ld] - s[i] * x[i + j * ld]) < 1e-12);
            CHECK(std::abs(y[i + j * ld] - y_ref[i + j * ld]) < 1e-12);
          }

        std::vector<double> w(m);
        for (auto& wi : w) wi = u(rng);
        double expect = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < m; ++i) expect += w[i] * std::norm(x[i + j * ld]);
        CHECK(kt->weighted_norm2(m, n, w.data(), x.data(), ld) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("kernel selection by name") {
  CHECK(kernels::select("scalar"));
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select("sse9"));
  if (kernels::avx2_kernels()) {
    CHECK(kernels::select("avx2"));
    CHECK(std::string(kernels::active().name) == "avx2");
  }
  CHECK(kernels::select("auto"));
}

TEST_CASE("multiply routes through the kernels and matches Eigen") {
  const ComplexMatrix a = ComplexMatrix::Random(7, 5);
  const ComplexMatrix b = ComplexMatrix::Random(5, 3);
  for (const char* name : {"scalar", "auto"}) {
    REQUIRE(kernels::select(name));
    CHECK((multiply(a, b) - a * b).cwiseAbs().maxCoeff() < 1e-12);
  }
}
