#include <doctest.h>

#include <cmath>
#include <limits>

#include "chirp/quantum_core.hpp"

using namespace chirp;

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, unsigned seed) {
  std::srand(seed);
  const ComplexMatrix a = ComplexMatrix::Random(n, n);
  return 0.5 * (a + a.adjoint());
}

// Scaling and squaring with a truncated Taylor series; shares nothing with
// the eigendecomposition path.
ComplexMatrix taylor_expm(const ComplexMatrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm + 1e-300))) + 4);
  const ComplexMatrix x = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(a.rows(), a.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("spin operators obey the angular momentum algebra") {
  for (double s : {0.5, 1.0}) {
    CAPTURE(s);
    const SpinOperators op = spin_operators(s);
    const cplx i(0.0, 1.0);
    CHECK(max_abs(op.x * op.y - op.y * op.x - i * op.z) < 1e-14);
    CHECK(max_abs(op.y * op.z - op.z * op.y - i * op.x) < 1e-14);
    CHECK(max_abs(op.z * op.x - op.x * op.z - i * op.y) < 1e-14);
    const ComplexMatrix casimir = op.x * op.x + op.y * op.y + op.z * op.z;
    CHECK(max_abs(casimir - s * (s + 1.0) * identity(op.z.rows())) < 1e-14);
    CHECK(op.z(0, 0).real() == doctest::Approx(s));
  }
  CHECK_THROWS_AS(spin_operators(1.5), std::invalid_argument);
  CHECK_THROWS_AS(spin_operators(0.0), std::invalid_argument);
}

TEST_CASE("kron satisfies the mixed-product identity") {
  const ComplexMatrix a = ComplexMatrix::Random(2, 3), b = ComplexMatrix::Random(3, 2);
  const ComplexMatrix c = ComplexMatrix::Random(3, 2), d = ComplexMatrix::Random(2, 3);
  CHECK(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-12);
  CHECK(kron(a, b).rows() == 6);
  CHECK(kron(a, b).cols() == 6);
}

TEST_CASE("expm_hermitian matches a Taylor scaling-and-squaring oracle") {
  for (Eigen::Index n : {2, 3, 6, 9}) {
    const ComplexMatrix h = random_hermitian(n, static_cast<unsigned>(n));
    for (double t : {0.0, 0.3, 2.5, -7.0}) {
      CAPTURE(n);
      CAPTURE(t);
      const ComplexMatrix u = expm_hermitian(h, t);
      CHECK(max_abs(u - taylor_expm(cplx(0.0, -t) * h)) < 1e-9);
      CHECK(unitarity_error(u) < 1e-12);
    }
  }
}

TEST_CASE("expm_hermitian is a one-parameter group") {
  const ComplexMatrix h = random_hermitian(5, 42);
  const ComplexMatrix u1 = expm_hermitian(h, 0.7);
  const ComplexMatrix u2 = expm_hermitian(h, 1.9);
  CHECK(max_abs(u1 * u2 - expm_hermitian(h, 2.6)) < 1e-12);
  CHECK(max_abs(u1 * expm_hermitian(h, -0.7) - identity(5)) < 1e-12);
}

TEST_CASE("expm_hermitian rejects invalid input") {
  ComplexMatrix h = random_hermitian(3, 3);
  h(0, 1) += cplx(0.1, 0.0);
  CHECK_THROWS_AS(expm_hermitian(h, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(expm_hermitian(ComplexMatrix::Zero(2, 3), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(expm_hermitian(random_hermitian(2, 1), std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("eigh returns ascending eigenpairs") {
  const ComplexMatrix h = random_hermitian(6, 9);
  const HermitianEigen e = eigh(h);
  for (Eigen::Index k = 1; k < 6; ++k) CHECK(e.values(k) >= e.values(k - 1));
  CHECK(max_abs(h * e.vectors - e.vectors * e.values.asDiagonal()) < 1e-12);
  CHECK(is_hermitian(h));
}

TEST_CASE("normalize") {
  StateVector psi(2);
  psi << cplx(3.0, 0.0), cplx(0.0, 4.0);
  normalize(psi);
  CHECK(psi.norm() == doctest::Approx(1.0));
  StateVector zero = StateVector::Zero(3);
  CHECK_THROWS_AS(normalize(zero), std::invalid_argument);
}
