#pragma once

// Independent reference computations for the tests: plain loops only, no
// Eigen expression templates.

#include <cmath>
#include <complex>
#include <vector>

#include "dixmier/linalg.hpp"

namespace oracle {

using dixmier::ComplexMatrix;
using dixmier::Index;
using cd = std::complex<double>;

inline ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix C(A.rows(), B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) {
      cd s = 0;
      for (Index k = 0; k < A.cols(); ++k) s += A(i, k) * B(k, j);
      C(i, j) = s;
    }
  return C;
}

inline ComplexMatrix adjoint(const ComplexMatrix& A) {
  ComplexMatrix B(A.cols(), A.rows());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) B(j, i) = std::conj(A(i, j));
  return B;
}

inline ComplexMatrix add(const ComplexMatrix& A, const ComplexMatrix& B, cd beta = 1.0) {
  ComplexMatrix C(A.rows(), A.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) + beta * B(i, j);
  return C;
}

inline ComplexMatrix identity(Index n) {
  ComplexMatrix I(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) I(i, j) = i == j ? 1.0 : 0.0;
  return I;
}

inline double fro(const ComplexMatrix& A) {
  double s = 0;
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) s += std::norm(A(i, j));
  return std::sqrt(s);
}

inline cd trace_mean(const ComplexMatrix& A) {
  cd s = 0;
  for (Index i = 0; i < A.rows(); ++i) s += A(i, i);
  return s / static_cast<double>(A.rows());
}

/// ||diag(U^* X U) - tau(X)||_2
inline double diagonal_deviation(const ComplexMatrix& X, const ComplexMatrix& U) {
  const ComplexMatrix M = matmul(matmul(adjoint(U), X), U);
  const cd mu = trace_mean(X);
  double s = 0;
  for (Index i = 0; i < M.rows(); ++i) s += std::norm(M(i, i) - mu);
  return std::sqrt(s);
}

inline double projection_defect(const ComplexMatrix& P) {
  return std::max(fro(add(matmul(P, P), P, -1.0)), fro(add(P, adjoint(P), -1.0)));
}

inline double unitarity_defect(const ComplexMatrix& U) {
  return fro(add(matmul(adjoint(U), U), identity(U.cols()), -1.0));
}

}  // namespace oracle
