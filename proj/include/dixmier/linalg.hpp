#pragma once

// Dense complex linear algebra used by every construction in the library.
//
// All routines are free functions templated on the Eigen expression they
// receive; results are plain dense matrices over std::complex<Real>.  The
// Hermitian eigensolver is a cyclic complex Jacobi method.  SVD-based
// routines (polar form, range projections, operator norm) delegate to
// Eigen::JacobiSVD.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dixmier/errors.hpp"
#include "dixmier/tolerances.hpp"

namespace dixmier {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;
using Index = Eigen::Index;

template <typename Derived>
using real_t = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

template <typename Real>
struct EigenSystem {
  RVector<Real> values;   // ascending
  CMatrix<Real> vectors;  // columns are eigenvectors
  int sweeps = 0;
};

template <typename Real>
struct PolarForm {
  CMatrix<Real> isometry;  // unitary; arbitrary (but unitary) on ker(A)
  CMatrix<Real> modulus;   // |A| = (A*A)^{1/2}
  Index kernel_dim = 0;    // dimension on which the isometry was completed
};

// ---------------------------------------------------------------------------
// Shape checks and elementary functionals

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << A.rows() << "x" << A.cols();
    throw DimensionError(os.str());
  }
}

template <typename DerivedA, typename DerivedB>
void require_same_shape(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
                        const char* what) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    std::ostringstream os;
    os << what << ": shape mismatch " << A.rows() << "x" << A.cols() << " vs " << B.rows() << "x"
       << B.cols();
    throw DimensionError(os.str());
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& A) {
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i) {
      const auto z = std::complex<real_t<Derived>>(A(i, j));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

/// tr(A)/n, the normalized trace with tau(I) = 1.
template <typename Derived>
std::complex<real_t<Derived>> normalized_trace(const Eigen::MatrixBase<Derived>& A) {
  require_square(A, "normalized_trace");
  return std::complex<real_t<Derived>>(A.trace()) / static_cast<real_t<Derived>>(A.rows());
}

template <typename Derived>
real_t<Derived> fro_norm(const Eigen::MatrixBase<Derived>& A) {
  return A.norm();
}

template <typename Derived>
real_t<Derived> max_abs(const Eigen::MatrixBase<Derived>& A) {
  return A.size() == 0 ? real_t<Derived>(0) : A.cwiseAbs().maxCoeff();
}

/// Largest singular value.
template <typename Derived>
real_t<Derived> op_norm(const Eigen::MatrixBase<Derived>& A) {
  using Real = real_t<Derived>;
  if (A.size() == 0) throw DimensionError("op_norm: empty matrix");
  const CMatrix<Real> M = A.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMatrix<Real>> svd(M);
  return svd.singularValues()(0);
}

/// max_ij |a_ij - conj(a_ji)|
template <typename Derived>
real_t<Derived> hermitian_defect(const Eigen::MatrixBase<Derived>& A) {
  return max_abs(A - A.adjoint());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& A, const Tolerances& tol = default_tolerances()) {
  if (A.rows() != A.cols()) return false;
  const auto scale = std::max(real_t<Derived>(1), max_abs(A));
  return hermitian_defect(A) <= tol.hermitian_tol * scale;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& A, const char* what,
                       const Tolerances& tol = default_tolerances()) {
  require_square(A, what);
  if (!is_hermitian(A, tol)) {
    std::ostringstream os;
    os << what << ": input is not Hermitian (max |a_ij - conj(a_ji)| = " << hermitian_defect(A)
       << ")";
    throw ContractError(os.str());
  }
}

/// ||U*U - I||_F
template <typename Derived>
real_t<Derived> unitarity_defect(const Eigen::MatrixBase<Derived>& U) {
  using Real = real_t<Derived>;
  const CMatrix<Real> M = U.template cast<std::complex<Real>>();
  return (M.adjoint() * M - CMatrix<Real>::Identity(M.cols(), M.cols())).norm();
}

/// max(||P^2 - P||_F, ||P - P*||_F)
template <typename Derived>
real_t<Derived> projection_defect(const Eigen::MatrixBase<Derived>& P) {
  using Real = real_t<Derived>;
  const CMatrix<Real> M = P.template cast<std::complex<Real>>();
  return std::max((M * M - M).norm(), (M - M.adjoint()).norm());
}

template <typename DerivedB, typename DerivedC>
auto commutator(const Eigen::MatrixBase<DerivedB>& B, const Eigen::MatrixBase<DerivedC>& C) {
  using Real = real_t<DerivedB>;
  const CMatrix<Real> b = B.template cast<std::complex<Real>>();
  const CMatrix<Real> c = C.template cast<std::complex<Real>>();
  return CMatrix<Real>(b * c - c * b);
}

/// X*X - XX*
template <typename Derived>
auto self_commutator(const Eigen::MatrixBase<Derived>& X) {
  using Real = real_t<Derived>;
  const CMatrix<Real> x = X.template cast<std::complex<Real>>();
  return CMatrix<Real>(x.adjoint() * x - x * x.adjoint());
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)

namespace detail {

// Makes the first component of magnitude above `floor` real and positive.
template <typename Real>
void normalize_phase(Eigen::Ref<CVector<Real>> v, Real floor) {
  for (Index k = 0; k < v.size(); ++k) {
    const Real m = std::abs(v(k));
    if (m > floor) {
      v *= std::conj(v(k)) / m;
      return;
    }
  }
}

}  // namespace detail

/// Eigenvalues ascending; eigenvectors phase-normalized so that their first
/// non-negligible component is real positive.
template <typename Derived>
EigenSystem<real_t<Derived>> hermitian_eig(const Eigen::MatrixBase<Derived>& H,
                                           const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  using Complex = std::complex<Real>;
  require_hermitian(H, "hermitian_eig", tol);

  const Index n = H.rows();
  CMatrix<Real> A = H.template cast<Complex>();
  A = (A + A.adjoint()) / Real(2);
  CMatrix<Real> V = CMatrix<Real>::Identity(n, n);

  const Real total = A.norm();
  int sweep = 0;
  auto off_norm = [&] {
    Real s = 0;
    for (Index q = 0; q < n; ++q)
      for (Index p = 0; p < n; ++p)
        if (p != q) s += std::norm(A(p, q));
    return std::sqrt(s);
  };

  if (total > 0) {
    for (;; ++sweep) {
      const Real off = off_norm();
      if (off <= Real(tol.jacobi_tol) * total) break;
      if (sweep >= tol.jacobi_max_sweeps) {
        std::ostringstream os;
        os << "hermitian_eig: no convergence after " << sweep
           << " sweeps, off-diagonal norm = " << off;
        throw NumericError(os.str());
      }
      // Skip small pivots during the first sweeps only.
      const Real threshold = sweep < 3 ? Real(0.2) * off / Real(n * n) : Real(0);
      for (Index p = 0; p + 1 < n; ++p) {
        for (Index q = p + 1; q < n; ++q) {
          const Complex apq = A(p, q);
          const Real r = std::abs(apq);
          if (r == Real(0) || r <= threshold) continue;
          const Real app = A(p, p).real();
          const Real aqq = A(q, q).real();
          if (sweep > 3 && std::abs(app) + Real(100) * r == std::abs(app) &&
              std::abs(aqq) + Real(100) * r == std::abs(aqq)) {
            A(p, q) = A(q, p) = Complex(0);
            continue;
          }
          const Complex u = apq / r;
          const Real theta = (aqq - app) / (Real(2) * r);
          Real t = Real(1) / (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
          if (theta < 0) t = -t;
          const Real c = Real(1) / std::sqrt(t * t + Real(1));
          const Real s = t * c;
          // G = diag(1, conj(u)) * [[c, s], [-s, c]] embedded at (p, q).
          const Complex gpp = c, gpq = s, gqp = -s * std::conj(u), gqq = c * std::conj(u);
          for (Index k = 0; k < n; ++k) {
            const Complex mp = A(k, p), mq = A(k, q);
            A(k, p) = mp * gpp + mq * gqp;
            A(k, q) = mp * gpq + mq * gqq;
          }
          for (Index k = 0; k < n; ++k) {
            const Complex mp = A(p, k), mq = A(q, k);
            A(p, k) = std::conj(gpp) * mp + std::conj(gqp) * mq;
            A(q, k) = std::conj(gpq) * mp + std::conj(gqq) * mq;
          }
          A(p, q) = A(q, p) = Complex(0);
          A(p, p) = Complex(A(p, p).real());
          A(q, q) = Complex(A(q, q).real());
          for (Index k = 0; k < n; ++k) {
            const Complex vp = V(k, p), vq = V(k, q);
            V(k, p) = vp * gpp + vq * gqp;
            V(k, q) = vp * gpq + vq * gqq;
          }
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return A(a, a).real() < A(b, b).real(); });

  EigenSystem<Real> result;
  result.values.resize(n);
  result.vectors.resize(n, n);
  result.sweeps = sweep;
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    result.values(k) = A(src, src).real();
    result.vectors.col(k) = V.col(src);
    detail::normalize_phase<Real>(result.vectors.col(k), Real(1e-10));
  }
  return result;
}

/// V diag(f(values)) V*
template <typename Real, typename F>
CMatrix<Real> spectral_function(const EigenSystem<Real>& es, F&& f) {
  RVector<Real> fv(es.values.size());
  for (Index k = 0; k < fv.size(); ++k) fv(k) = f(es.values(k));
  CMatrix<Real> M = es.vectors * fv.template cast<std::complex<Real>>().asDiagonal() *
                    es.vectors.adjoint();
  return (M + M.adjoint()) / Real(2);
}

// ---------------------------------------------------------------------------
// SVD-based routines

template <typename Derived>
PolarForm<real_t<Derived>> polar_decompose(const Eigen::MatrixBase<Derived>& A,
                                           const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  require_square(A, "polar_decompose");
  const CMatrix<Real> M = A.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMatrix<Real>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();

  PolarForm<Real> out;
  // Kernel columns of V (right) map onto kernel columns of U (left) in index order.
  out.isometry = svd.matrixU() * svd.matrixV().adjoint();
  CMatrix<Real> mod = svd.matrixV() * sv.template cast<std::complex<Real>>().asDiagonal() *
                      svd.matrixV().adjoint();
  out.modulus = (mod + mod.adjoint()) / Real(2);
  const Real cutoff = Real(tol.rank_tol) * sv(0);
  out.kernel_dim = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (!(sv(k) > cutoff) || sv(0) == Real(0)) ++out.kernel_dim;
  return out;
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& A, const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  const CMatrix<Real> M = A.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMatrix<Real>> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == Real(0)) return 0;
  Index r = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > Real(tol.rank_tol) * sv(0)) ++r;
  return r;
}

/// Orthonormal columns spanning the numerical range of A.
template <typename Derived>
CMatrix<real_t<Derived>> range_basis(const Eigen::MatrixBase<Derived>& A,
                                     const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  const CMatrix<Real> M = A.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMatrix<Real>> svd(M, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Index r = 0;
  if (sv.size() > 0 && sv(0) > Real(0))
    for (Index k = 0; k < sv.size(); ++k)
      if (sv(k) > Real(tol.rank_tol) * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

/// Orthogonal projection onto the range of A.
template <typename Derived>
CMatrix<real_t<Derived>> range_projection(const Eigen::MatrixBase<Derived>& A,
                                          const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  require_square(A, "range_projection");
  const CMatrix<Real> B = range_basis(A, tol);
  if (B.cols() == 0) return CMatrix<Real>::Zero(A.rows(), A.cols());
  CMatrix<Real> P = B * B.adjoint();
  return (P + P.adjoint()) / Real(2);
}

/// Orthonormal basis of the range of a projection, read from its eigenvectors.
template <typename Derived>
CMatrix<real_t<Derived>> projection_basis(const Eigen::MatrixBase<Derived>& P,
                                          const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  const auto es = hermitian_eig(P, tol);
  Index first = 0;
  while (first < es.values.size() && es.values(first) < Real(0.5)) ++first;
  return es.vectors.rightCols(es.values.size() - first);
}

/// Hermitian PSD square root; eigenvalues within psd_tol below zero are clamped.
template <typename Derived>
CMatrix<real_t<Derived>> psd_sqrt(const Eigen::MatrixBase<Derived>& A,
                                  const Tolerances& tol = default_tolerances()) {
  using Real = real_t<Derived>;
  const auto es = hermitian_eig(A, tol);
  const Real scale = std::max(Real(1), es.values.cwiseAbs().maxCoeff());
  if (es.values(0) < -Real(tol.psd_tol) * scale) {
    std::ostringstream os;
    os << "psd_sqrt: matrix is not positive semidefinite (min eigenvalue " << es.values(0) << ")";
    throw NotPsdError(os.str(), static_cast<double>(es.values(0)));
  }
  return spectral_function(es, [](Real x) { return std::sqrt(std::max(x, Real(0))); });
}

// ---------------------------------------------------------------------------
// Seeded test matrices. Entries are complex Gaussians with unit variance.

template <typename Real = double>
CMatrix<Real> random_gaussian(Index rows, Index cols, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0) throw DimensionError("random_gaussian: dimensions must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<Real> dist(Real(0), Real(1));
  const Real s = Real(1) / std::sqrt(Real(2));
  CMatrix<Real> G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const Real re = dist(gen);
      const Real im = dist(gen);
      G(i, j) = std::complex<Real>(re * s, im * s);
    }
  return G;
}

/// Haar-distributed unitary: QR of a Gaussian matrix with R's diagonal phases removed.
template <typename Real = double>
CMatrix<Real> random_unitary(Index n, std::uint64_t seed) {
  if (n <= 0) throw DimensionError("random_unitary: n must be positive");
  const CMatrix<Real> G = random_gaussian<Real>(n, n, seed);
  Eigen::HouseholderQR<CMatrix<Real>> qr(G);
  CMatrix<Real> Q = qr.householderQ() * CMatrix<Real>::Identity(n, n);
  const CMatrix<Real>& R = qr.matrixQR();
  for (Index k = 0; k < n; ++k) {
    const std::complex<Real> d = R(k, k);
    const Real m = std::abs(d);
    if (m > Real(0)) Q.col(k) *= d / m;
  }
  return Q;
}

template <typename Real = double>
CMatrix<Real> random_hermitian(Index n, std::uint64_t seed) {
  const CMatrix<Real> G = random_gaussian<Real>(n, n, seed);
  return (G + G.adjoint()) / Real(2);
}

template <typename Real = double>
CMatrix<Real> random_trace_zero(Index n, std::uint64_t seed) {
  CMatrix<Real> G = random_gaussian<Real>(n, n, seed);
  G.diagonal().array() -= normalized_trace(G);
  return G;
}

template <typename Real = double>
CMatrix<Real> random_hermitian_trace_zero(Index n, std::uint64_t seed) {
  CMatrix<Real> H = random_hermitian<Real>(n, seed);
  H.diagonal().array() -= normalized_trace(H).real();
  return H;
}

}  // namespace dixmier
