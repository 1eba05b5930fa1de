#include "dixmier/schur_split.hpp"

#include <cmath>
#include <limits>

namespace dixmier {

double nilpotency_residual(const ComplexMatrix& K) {
  require_square(K, "nilpotency_residual");
  ComplexMatrix power = K;
  for (Index k = 1; k < K.rows(); ++k) power = power * K;
  return power.norm();
}

SchurSplitWitness normal_plus_nilpotent(const ComplexMatrix& X, const SolverConfig& solver,
                                        const Tolerances& tol) {
  require_square(X, "normal_plus_nilpotent");
  const Index n = X.rows();
  const cd lambda = normalized_trace(X);

  SchurSplitWitness w;
  bool certified = true;
  if (is_hermitian(X, tol)) {
    w.basis = equal_diagonal_hermitian((X + X.adjoint()) / 2.0, tol);
    w.exact_route = true;
  } else {
    auto result = simultaneous_pinch(PinchProblem{{X}, solver}, tol);
    certified = result.certified();
    w.basis = std::move(result.witness);
    w.exact_route = false;
  }
  // A trace at rounding level carries no direction.
  const double lambda_floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + X.norm());
  w.theta = std::abs(lambda) <= lambda_floor ? 0.0 : std::arg(lambda);
  const cd phase = std::polar(1.0, w.theta);
  const double modulus = std::abs(lambda);

  const ComplexMatrix& U = w.basis.U;
  const ComplexMatrix Xt = U.adjoint() * X * U;
  ComplexMatrix S = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    S(k, k) = modulus;
    for (Index j = k + 1; j < n; ++j) {
      S(k, j) = std::conj(phase) * Xt(k, j);
      S(j, k) = std::conj(S(k, j));
    }
  }
  const ComplexMatrix Nt = phase * S;
  ComplexMatrix Kt = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = j + 1; k < n; ++k) Kt(k, j) = Xt(k, j) - Nt(k, j);

  w.hermitian_part = S;
  w.nilpotent_in_basis = Kt;
  w.normal = U * Nt * U.adjoint();
  w.nilpotent = U * Kt * U.adjoint();
  w.sum_residual = (w.normal + w.nilpotent - X).norm();
  w.normality_residual = (w.normal * w.normal.adjoint() - w.normal.adjoint() * w.normal).norm();
  w.power_residual = nilpotency_residual(w.nilpotent);

  const bool ok = w.sum_residual <= 1e-8 * (1.0 + X.norm()) &&
                  w.normality_residual <= 1e-8 * (1.0 + w.normal.squaredNorm()) &&
                  w.power_residual <= 1e-6;
  if (!certified)
    w.status = WitnessStatus::feasibility_not_certified;
  else
    w.status = ok ? WitnessStatus::pass : WitnessStatus::fail;
  return w;
}

DecompositionCertificate verify_split(const ComplexMatrix& X, const SchurSplitWitness& witness,
                                      const Tolerances& tol) {
  require_square(X, "verify_split");
  require_same_shape(X, witness.normal, "verify_split");
  require_same_shape(X, witness.nilpotent, "verify_split");
  const ComplexMatrix& N = witness.normal;
  const ComplexMatrix& K = witness.nilpotent;

  DecompositionCertificate cert;
  cert.operation = "schur-split";
  cert.tolerances = tol;
  cert.inputs = {X};
  cert.factors = {{"N", N}, {"K", K}, {"U", witness.basis.U}};
  cert.scalars = {{"theta", witness.theta}};

  ComplexMatrix upper = witness.basis.U.adjoint() * K * witness.basis.U;
  double structure = 0;
  for (Index j = 0; j < upper.cols(); ++j)
    for (Index k = 0; k <= j; ++k) structure = std::max(structure, std::abs(upper(k, j)));

  cert.residuals = {
      {"sum", (N + K - X).norm(), 1e-8 * (1.0 + X.norm())},
      {"normality", (N * N.adjoint() - N.adjoint() * N).norm(), 1e-8 * (1.0 + N.squaredNorm())},
      {"nilpotency", nilpotency_residual(K), 1e-6},
      {"triangularity", structure, 1e-8 * (1.0 + K.norm())},
      {"unitarity", unitarity_defect(witness.basis.U), 1e-12 * std::sqrt(static_cast<double>(X.rows()))},
  };
  cert.status = cert.all_residuals_pass() ? CertificateStatus::pass : CertificateStatus::fail;
  if (witness.status == WitnessStatus::feasibility_not_certified && cert.status == CertificateStatus::fail)
    cert.status = CertificateStatus::feasibility_not_certified;
  return cert;
}

}  // namespace dixmier
