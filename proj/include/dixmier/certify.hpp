#pragma once

// Certificates for each decomposition. Residuals are produced by a single
// recomputation routine that reads only the certificate's inputs, factors,
// scalars and notes, so `verify` and the producers cannot disagree on the
// formulas.

#include "dixmier/certificate.hpp"
#include "dixmier/commutators.hpp"
#include "dixmier/projections.hpp"
#include "dixmier/schur_split.hpp"

namespace dixmier {

inline constexpr const char* kToolVersion = "dixmier 0.1.0";

DecompositionCertificate certify_pinch(const std::vector<ComplexMatrix>& inputs, const PinchResult& result,
                                       const SolverConfig& solver, const Tolerances& tol = default_tolerances());
DecompositionCertificate certify_commutator(const ComplexMatrix& A, const CommutatorWitness& w,
                                            const SolverConfig& solver, const Tolerances& tol = default_tolerances());
DecompositionCertificate certify_self_commutator(const ComplexMatrix& A, const SelfCommutatorWitness& w,
                                                 const Tolerances& tol = default_tolerances());
DecompositionCertificate certify_two_projection(const ComplexMatrix& A, const ComplexMatrix& U,
                                                const TwoProjectionCombination& w,
                                                const Tolerances& tol = default_tolerances());
DecompositionCertificate certify_four_projection(const ComplexMatrix& A, const FourProjectionWitness& w,
                                                 const Tolerances& tol = default_tolerances());
DecompositionCertificate certify_schur_split(const ComplexMatrix& X, const SchurSplitWitness& w,
                                             const SolverConfig& solver, const Tolerances& tol = default_tolerances());

/// Residuals and thresholds for `cert.operation`, computed from stored data only.
/// Throws ContractError when a required input, factor or scalar is missing.
std::vector<ResidualEntry> recompute_residuals(const DecompositionCertificate& cert);

struct VerifyReport {
  bool digest_matches = false;
  bool residuals_agree = false;  // every stored value within 1e-12 of its recomputation
  bool residuals_pass = false;   // every recomputed value within its threshold
  bool status_pass = false;      // stored status is "pass"
  std::vector<ResidualEntry> recomputed;
  std::vector<std::string> problems;

  bool passed() const { return digest_matches && residuals_agree && residuals_pass && status_pass; }
};

inline constexpr double kResidualAgreement = 1e-12;

VerifyReport verify_certificate(const DecompositionCertificate& cert);

}  // namespace dixmier
