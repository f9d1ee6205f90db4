#include "chirp/quantum_core.hpp"

#include <cmath>
#include <stdexcept>

#include "chirp/kernels.hpp"

namespace chirp {

SpinOperators spin_operators(double s) {
  if (s != 0.5 && s != 1.0) {
    throw std::invalid_argument("spin_operators: only s = 1/2 and s = 1 are supported");
  }
  const auto dim = static_cast<Eigen::Index>(std::lround(2.0 * s + 1.0));
  SpinOperators ops{ComplexMatrix::Zero(dim, dim), ComplexMatrix::Zero(dim, dim),
                    ComplexMatrix::Zero(dim, dim)};
  // Row i holds m = s - i. S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>.
  ComplexMatrix raise = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double m = s - static_cast<double>(i);
    ops.z(i, i) = m;
    if (i > 0) raise(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix lower = raise.adjoint();
  ops.x = 0.5 * (raise + lower);
  ops.y = cplx(0.0, -0.5) * (raise - lower);
  return ops;
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
  ComplexMatrix c(a.rows(), b.cols());
  if (c.size() == 0) return c;
  if (a.cols() == 0) {
    c.setZero();
    return c;
  }
  kernels::active().gemm(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.cols()),
                         static_cast<std::size_t>(a.cols()), a.data(),
                         static_cast<std::size_t>(a.outerStride()), b.data(),
                         static_cast<std::size_t>(b.outerStride()), c.data(),
                         static_cast<std::size_t>(c.outerStride()));
  return c;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

double unitarity_error(const ComplexMatrix& u) {
  const ComplexMatrix d = u.adjoint() * u - identity(u.cols());
  return d.cwiseAbs().maxCoeff();
}

HermitianEigen eigh(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("expm_hermitian: non-finite duration");
  if (h.rows() != h.cols() || !is_hermitian(h)) {
    throw std::invalid_argument("expm_hermitian: generator is not Hermitian");
  }
  const HermitianEigen e = eigh(h);
  ComplexMatrix scaled = e.vectors;
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
    scaled.col(k) *= std::polar(1.0, -e.values(k) * t);
  }
  return multiply(scaled, e.vectors.adjoint());
}

void normalize(StateVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("normalize: zero vector");
  psi /= n;
}

}  // namespace chirp
