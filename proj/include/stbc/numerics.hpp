// SPDX-License-Identifier: Apache-2.0
//
// Small dense complex/real matrix helpers used by the code constructions and
// the decoders: circulant forms, the DFT and Walsh-Hadamard diagonalizers and
// Hermitian matrix square roots. Matrices here never exceed 16x16.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stbc {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Invalid user input (names, sizes, malformed files). Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition failed at run time (singular channel, non-Hermitian
/// input, search space too large). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kOrthogonalTol = 1e-12;

/// Row i is x cyclically shifted right i times (0-based), so C(i,k) = x[(k-i) mod m].
ComplexMatrix circulant(const ComplexVector& x);

/// Row i is x cyclically shifted left i times, so C_L(i,k) = x[(k+i) mod m].
ComplexMatrix left_circulant(const ComplexVector& x);

/// Swaps rows i and m-i for i = 1 .. ceil(m/2)-1 (0-based). Maps a left
/// circulant onto the right circulant with the same first row. Works on column
/// vectors as well (a vector is an m x 1 matrix).
ComplexMatrix pi_permute(const ComplexMatrix& x);

/// Unitary DFT matrix, F(j,k) = exp(-2 pi i jk/m) / sqrt(m).
ComplexMatrix dft_matrix(int m);

/// Theta = 1/2 (F2 kron F2) with F2 = [[1,1],[1,-1]]. Real, symmetric, involutory.
RealMatrix theta4();

/// Eigenvalues of circulant(x) in the order that makes
/// dft_matrix(m) * circulant(x) * dft_matrix(m)^H == diag(lambda).
/// This is the unnormalized transform lambda_j = sum_n x_n exp(+2 pi i jn/m);
/// the all-ones vector maps to (m, 0, ..., 0).
ComplexVector circulant_eigenvalues(const ComplexVector& x);

/// 4x4 block-circulant matrix with 2x2 circulant blocks built from (x1..x4):
///   [[x1 x2 x3 x4], [x2 x1 x4 x3], [x3 x4 x1 x2], [x4 x3 x2 x1]].
/// Every such matrix is symmetric and diagonalized by theta4().
ComplexMatrix block_circulant4(const ComplexVector& x);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);
bool is_orthogonal(const RealMatrix& q, double tol = kOrthogonalTol);
bool is_unitary(const ComplexMatrix& u, double tol = kOrthogonalTol);

/// Principal square root of a Hermitian PSD matrix via eigendecomposition.
/// Eigenvalues in [-kHermitianTol, 0) are clamped to zero.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a);

/// Inverse principal square root. Throws NumericalError when the smallest
/// eigenvalue is below `floor`.
ComplexMatrix hermitian_inverse_sqrt(const ComplexMatrix& a, double floor = 1e-12);

/// Largest absolute off-diagonal entry.
double off_diagonal_norm(const ComplexMatrix& a);

}  // namespace stbc
