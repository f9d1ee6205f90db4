#pragma once

#include <Eigen/Dense>
#include <complex>

namespace chirp {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Angular-momentum matrices in the |m> basis ordered m = +s, ..., -s.
struct SpinOperators {
  ComplexMatrix x;
  ComplexMatrix y;
  ComplexMatrix z;
};

/// Supports s = 1/2 and s = 1; anything else throws std::invalid_argument.
SpinOperators spin_operators(double s);

ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Product through the dispatched complex GEMM kernel.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance);

/// max |(U^dagger U - I)_ij|
double unitarity_error(const ComplexMatrix& u);

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns are eigenvectors
};

HermitianEigen eigh(const ComplexMatrix& h);

/// exp(-i h t) from the eigendecomposition of h. Throws std::invalid_argument
/// if h is not square and Hermitian or t is not finite.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t);

/// Normalizes in place; throws std::invalid_argument for a zero vector.
void normalize(StateVector& psi);

}  // namespace chirp
