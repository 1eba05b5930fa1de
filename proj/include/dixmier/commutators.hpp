#pragma once

// Single commutators A = BC - CB and self-commutators A = X^*X - XX^* for
// trace-zero operators, built in a basis where A has zero diagonal.

#include "dixmier/pinching.hpp"

namespace dixmier {

enum class WitnessStatus { pass, fail, feasibility_not_certified };

const char* to_string(WitnessStatus status);

struct CommutatorWitness {
  ComplexMatrix B;  // in the original coordinates
  ComplexMatrix C;  // unitary with C^n = I; diagonal of roots of unity in the witness basis
  UnitaryWitness basis;
  bool exact_route = true;     // Hermitian input, exact equal-diagonal basis
  double pinch_residual = 0;   // diagonal deviation of the basis, kept apart from `residual`
  double residual = 0;         // ||BC - CB - A||_F
  double threshold = 0;        // residual bound used for the verdict
  double entry_bound = 0;      // max|A_kj| / (2 sin(pi/n)) in the witness basis
  WitnessStatus status = WitnessStatus::fail;
};

CommutatorWitness commutator_factorize(const ComplexMatrix& A,
                                       const SolverConfig& solver = {},
                                       const Tolerances& tol = default_tolerances());

struct SelfCommutatorWitness {
  ComplexMatrix X;
  ComplexMatrix D;  // Hermitian, zero diagonal in the witness basis
  ComplexMatrix C;
  double lambda = 0;
  UnitaryWitness basis;
  double residual = 0;               // ||X^*X - XX^* - A||_F
  double intermediate_residual = 0;  // ||D - C D C^* - A||_F
  double threshold = 0;
  WitnessStatus status = WitnessStatus::fail;
};

/// Margin added to ||D||_op when choosing the shift lambda.
inline constexpr double kLambdaMargin = 1.0;

SelfCommutatorWitness self_commutator_factorize(const ComplexMatrix& A,
                                                const Tolerances& tol = default_tolerances());

struct ShiftedOperator {
  ComplexMatrix X;
  double t = 0;
};

/// X = X0 + tI with t = ||X0||_op + sqrt(floor) + 1, so that X^*X > floor * I
/// while X^*X - XX^* is unchanged.
ShiftedOperator shift_for_positivity(const ComplexMatrix& X0, double floor);

}  // namespace dixmier
