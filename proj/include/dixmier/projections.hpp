#pragma once

// Decompositions of Hermitian operators into projections: sums of two
// projections, two-projection combinations under a sign-flipping symmetry,
// and linear combinations of four projections.

#include <array>
#include <string>
#include <vector>

#include "dixmier/commutators.hpp"

namespace dixmier {

struct EigenPair {
  double t = 0;        // eigenvalue of T - I carried by the pair (0 for a lone zero line)
  Index positive = -1; // eigenvector index for +t
  Index negative = -1; // eigenvector index for -t; -1 for an unpaired zero line
};

struct TwoProjectionSum {
  ComplexMatrix P;
  ComplexMatrix Q;
  std::vector<EigenPair> pairing;
  double residual = 0;  // ||P + Q - T||_F
};

/// T = P + Q for Hermitian 0 <= T <= 2I whose T - I has a spectrum symmetric about zero.
TwoProjectionSum sum_of_two_projections(const ComplexMatrix& T,
                                        const Tolerances& tol = default_tolerances());

struct TwoProjectionCombination {
  double a = 0;
  ComplexMatrix P;
  double b = 0;
  ComplexMatrix Q;
  bool degenerate = false;  // A = 0
  double residual = 0;      // ||aP + bQ - A||_F
};

/// A = aP + bQ for Hermitian trace-zero A with A + U^*AU = 0.
TwoProjectionCombination two_projection_combination(const ComplexMatrix& A, const ComplexMatrix& U,
                                                    const Tolerances& tol = default_tolerances());

struct FourProjectionWitness {
  // A = c[0] P[0] + c[1] P[1] + c[2] P[2] + c[3] P[3]; the coefficients are
  // s * (a, b, lambda, -lambda) and the projections (P3', P4', P1, P2).
  std::array<double, 4> coefficients{};
  std::array<ComplexMatrix, 4> projections;

  double scale = 0;  // s = tau(A), or 1 for the trace-zero variant
  bool trace_zero_variant = false;
  double a = 0, b = 0, d = 0, lambda = 0;
  double shift = 1;  // identity shift removed before splitting (0 in the trace-zero variant)
  double t = 0;      // from shift_for_positivity

  ComplexMatrix E1, E2;  // orthonormal bases of the two halves of the eigenbasis
  ComplexMatrix A1, A2;  // compressions of A/s - shift*I to the halves
  ComplexMatrix X;       // X^*X - XX^* = A1 + A2 and X^*X > 3I
  ComplexMatrix Y;       // X^*X - shift*I
  ComplexMatrix S1, S2;
  ComplexMatrix polar_unitary;

  double offdiagonal_identity = 0;  // ||a^2(I - S1^2) - b^2(I - S2^2)|| / (a^2 ||I - S1^2||)
  double diagonal_identity = 0;     // ||(a(I+S1) + b(I+S2))/2 - shift*I - Y|| / ||Y||
  double s1_min = 0, s1_max = 0, s2_min = 0, s2_max = 0;
  std::array<double, 4> projection_residuals{};
  double residual = 0;  // ||sum_k c_k P_k - A||_F
};

FourProjectionWitness four_projection_combination(const ComplexMatrix& A,
                                                  const Tolerances& tol = default_tolerances());

}  // namespace dixmier
