// SPDX-License-Identifier: Apache-2.0

#include "stbc/numerics.hpp"

#include <cmath>
#include <numbers>

namespace stbc {

namespace {

void require_nonempty(const ComplexVector& x, const char* what) {
  if (x.size() == 0) {
    throw ConfigError(std::string(what) + ": empty input vector");
  }
}

}  // namespace

ComplexMatrix circulant(const ComplexVector& x) {
  require_nonempty(x, "circulant");
  const Eigen::Index m = x.size();
  ComplexMatrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      c(i, k) = x((k - i + m) % m);
    }
  }
  return c;
}

ComplexMatrix left_circulant(const ComplexVector& x) {
  require_nonempty(x, "left_circulant");
  const Eigen::Index m = x.size();
  ComplexMatrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      c(i, k) = x((k + i) % m);
    }
  }
  return c;
}

ComplexMatrix pi_permute(const ComplexMatrix& x) {
  const Eigen::Index m = x.rows();
  ComplexMatrix out(m, x.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    out.row(i) = x.row((m - i) % m);
  }
  return out;
}

ComplexMatrix dft_matrix(int m) {
  if (m < 1) throw ConfigError("dft_matrix: size must be >= 1");
  ComplexMatrix f(m, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      // Reduce the exponent modulo m so the phases are exact multiples of 2 pi / m.
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((j * k) % m) / m;
      f(j, k) = std::polar(norm, phase);
    }
  }
  return f;
}

RealMatrix theta4() {
  RealMatrix f2(2, 2);
  f2 << 1, 1, 1, -1;
  return 0.5 * kron(f2, f2);
}

ComplexVector circulant_eigenvalues(const ComplexVector& x) {
  require_nonempty(x, "circulant_eigenvalues");
  const Eigen::Index m = x.size();
  ComplexVector lambda = ComplexVector::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index n = 0; n < m; ++n) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * n) % m) / m;
      lambda(j) += x(n) * std::polar(1.0, phase);
    }
  }
  return lambda;
}

ComplexMatrix block_circulant4(const ComplexVector& x) {
  if (x.size() != 4) throw ConfigError("block_circulant4: need exactly 4 entries");
  ComplexMatrix b(4, 4);
  b << x(0), x(1), x(2), x(3),
       x(1), x(0), x(3), x(2),
       x(2), x(3), x(0), x(1),
       x(3), x(2), x(1), x(0);
  return b;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_orthogonal(const RealMatrix& q, double tol) {
  if (q.rows() != q.cols()) return false;
  const RealMatrix e = q.transpose() * q - RealMatrix::Identity(q.rows(), q.cols());
  return e.cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const ComplexMatrix e = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return e.cwiseAbs().maxCoeff() <= tol;
}

namespace {

Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eig(const ComplexMatrix& a,
                                                          const char* what) {
  if (!is_hermitian(a)) {
    throw NumericalError(std::string(what) + ": matrix is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": eigendecomposition failed");
  }
  return eig;
}

}  // namespace

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a, "hermitian_sqrt");
  RealVector ev = eig.eigenvalues();
  if (ev.minCoeff() < -kHermitianTol) {
    throw NumericalError("hermitian_sqrt: matrix is not positive semidefinite");
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix& v = eig.eigenvectors();
  return v * ev.cast<cdouble>().asDiagonal() * v.adjoint();
}

ComplexMatrix hermitian_inverse_sqrt(const ComplexMatrix& a, double floor) {
  const auto eig = hermitian_eig(a, "hermitian_inverse_sqrt");
  const RealVector& ev = eig.eigenvalues();
  if (ev.minCoeff() < floor) {
    throw NumericalError("hermitian_inverse_sqrt: matrix is singular");
  }
  const RealVector inv = ev.cwiseSqrt().cwiseInverse();
  const ComplexMatrix& v = eig.eigenvectors();
  return v * inv.cast<cdouble>().asDiagonal() * v.adjoint();
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) worst = std::max(worst, std::abs(a(i, j)));
    }
  }
  return worst;
}

}  // namespace stbc
