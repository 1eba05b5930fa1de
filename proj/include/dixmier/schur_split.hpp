#pragma once

// X = N + K with N normal and K nilpotent (strictly lower triangular in a
// basis where X has constant diagonal).

#include "dixmier/certificate.hpp"
#include "dixmier/commutators.hpp"

namespace dixmier {

struct SchurSplitWitness {
  ComplexMatrix normal;     // N = e^{i theta} S
  ComplexMatrix nilpotent;  // K, original coordinates
  ComplexMatrix nilpotent_in_basis;  // U^* K U; strict upper part and diagonal are exact zeros
  ComplexMatrix hermitian_part;      // S in the witness basis
  double theta = 0;
  UnitaryWitness basis;
  bool exact_route = true;
  double sum_residual = 0;        // ||N + K - X||_F
  double normality_residual = 0;  // ||NN^* - N^*N||_F
  double power_residual = 0;      // ||K^n||_F
  WitnessStatus status = WitnessStatus::fail;
};

SchurSplitWitness normal_plus_nilpotent(const ComplexMatrix& X, const SolverConfig& solver = {},
                                        const Tolerances& tol = default_tolerances());

/// ||K^n||_F by repeated multiplication.
double nilpotency_residual(const ComplexMatrix& K);

/// Recomputes every residual of the witness from X, N, K and the basis.
DecompositionCertificate verify_split(const ComplexMatrix& X, const SchurSplitWitness& witness,
                                      const Tolerances& tol = default_tolerances());

}  // namespace dixmier
