#include "dixmier/commutators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dixmier {

const char* to_string(WitnessStatus status) {
  switch (status) {
    case WitnessStatus::pass: return "pass";
    case WitnessStatus::fail: return "fail";
    case WitnessStatus::feasibility_not_certified: return "feasibility-not-certified";
  }
  return "fail";
}

namespace {

void require_trace_zero(const ComplexMatrix& A, const char* what, const Tolerances& tol) {
  const double t = std::abs(normalized_trace(A));
  if (t > tol.trace_tol * A.norm()) {
    std::ostringstream os;
    os << what << ": input must have trace zero (|tau(A)| = " << t << ")";
    throw ContractError(os.str());
  }
}

ComplexVector roots_of_unity(Index n) {
  ComplexVector w(n);
  for (Index k = 0; k < n; ++k) w(k) = root_of_unity(static_cast<long>(k), static_cast<long>(n));
  return w;
}

}  // namespace

CommutatorWitness commutator_factorize(const ComplexMatrix& A, const SolverConfig& solver,
                                       const Tolerances& tol) {
  require_square(A, "commutator_factorize");
  require_trace_zero(A, "commutator_factorize", tol);
  const Index n = A.rows();

  CommutatorWitness w;
  bool certified = true;
  if (is_hermitian(A, tol)) {
    w.basis = equal_diagonal_hermitian((A + A.adjoint()) / 2.0, tol);
    w.exact_route = true;
  } else {
    PinchProblem problem{{A}, solver};
    auto result = simultaneous_pinch(problem, tol);
    certified = result.certified();
    w.basis = std::move(result.witness);
    w.exact_route = false;
  }
  w.pinch_residual = diagonal_deviation(A, w.basis.U);

  const ComplexMatrix& U = w.basis.U;
  const ComplexMatrix At = U.adjoint() * A * U;
  const ComplexVector omega = roots_of_unity(n);
  ComplexMatrix Bt = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      if (k != j) Bt(k, j) = At(k, j) / (omega(j) - omega(k));

  w.B = U * Bt * U.adjoint();
  w.C = U * omega.asDiagonal() * U.adjoint();
  w.residual = (commutator(w.B, w.C) - A).norm();
  double off_max = 0;
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      if (k != j) off_max = std::max(off_max, std::abs(At(k, j)));
  w.entry_bound = n > 1 ? off_max / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n))) : 0.0;

  const double rel = w.exact_route ? tol.commutator_tol : tol.general_commutator_tol;
  w.threshold = rel * (1.0 + A.norm());
  if (!certified)
    w.status = WitnessStatus::feasibility_not_certified;
  else
    w.status = w.residual <= w.threshold ? WitnessStatus::pass : WitnessStatus::fail;
  return w;
}

SelfCommutatorWitness self_commutator_factorize(const ComplexMatrix& A, const Tolerances& tol) {
  require_hermitian(A, "self_commutator_factorize", tol);
  require_trace_zero(A, "self_commutator_factorize", tol);
  const Index n = A.rows();
  const ComplexMatrix Ah = (A + A.adjoint()) / 2.0;

  SelfCommutatorWitness w;
  w.basis = equal_diagonal_hermitian(Ah, tol);
  const ComplexMatrix& U = w.basis.U;
  ComplexMatrix At = U.adjoint() * Ah * U;
  At = (At + At.adjoint()).eval() / 2.0;

  const ComplexVector omega = roots_of_unity(n);
  ComplexMatrix Dt = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      if (k != j) Dt(k, j) = At(k, j) / (1.0 - root_of_unity(static_cast<long>(k - j), static_cast<long>(n)));
  Dt = (Dt + Dt.adjoint()).eval() / 2.0;

  w.lambda = op_norm(Dt) + kLambdaMargin;
  ComplexMatrix shifted = Dt;
  shifted.diagonal().array() += w.lambda;
  const ComplexMatrix root = psd_sqrt(shifted, tol);
  const ComplexMatrix Ct = omega.asDiagonal();
  const ComplexMatrix Xt = Ct * root;

  w.X = U * Xt * U.adjoint();
  w.D = U * Dt * U.adjoint();
  w.C = U * Ct * U.adjoint();
  w.residual = (self_commutator(w.X) - A).norm();
  w.intermediate_residual = (w.D - w.C * w.D * w.C.adjoint() - A).norm();
  w.threshold = tol.commutator_tol * (1.0 + A.norm());
  w.status = (w.residual <= w.threshold && w.intermediate_residual <= 1e-10 * (1.0 + A.norm()))
                 ? WitnessStatus::pass
                 : WitnessStatus::fail;
  return w;
}

ShiftedOperator shift_for_positivity(const ComplexMatrix& X0, double floor) {
  require_square(X0, "shift_for_positivity");
  if (!(floor > 0)) throw ContractError("shift_for_positivity: floor must be positive");
  ShiftedOperator out;
  out.t = op_norm(X0) + std::sqrt(floor) + 1.0;
  out.X = X0;
  out.X.diagonal().array() += out.t;
  return out;
}

}  // namespace dixmier
