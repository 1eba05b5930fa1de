#pragma once

// Pinching: partitions of the identity and unitaries that give operators a
// constant diagonal equal to their normalized trace.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dixmier/linalg.hpp"

namespace dixmier {

/// exp(2 pi i k / N), exact at multiples of a quarter turn.
cd root_of_unity(long k, long N);

/// Mutually orthogonal projections summing to the identity, stored as a
/// unitary whose consecutive column blocks span the parts: part k is
/// E_k = B_k B_k^* with B_k the k-th block of `basis`.
struct ProjectionPartition {
  ComplexMatrix basis;
  std::vector<Index> block_sizes;
  std::vector<std::string> labels;

  Index dimension() const { return basis.rows(); }
  std::size_t parts() const { return block_sizes.size(); }
  Index offset(std::size_t k) const;
  ComplexMatrix block_basis(std::size_t k) const;
  ComplexMatrix projection(std::size_t k) const;

  /// The n rank-one projections onto the columns of a unitary.
  static ProjectionPartition rank_one(const ComplexMatrix& U);
  /// Builds the basis from explicit projection matrices; throws ContractError
  /// when they are not mutually orthogonal non-zero projections summing to I.
  static ProjectionPartition from_projections(const std::vector<ComplexMatrix>& projections,
                                              std::vector<std::string> labels = {},
                                              const Tolerances& tol = default_tolerances());
};

struct PartitionDefects {
  double idempotent = 0;  // max_k ||E_k^2 - E_k||_F
  double hermitian = 0;   // max_k ||E_k - E_k^*||_F
  double cross = 0;       // max_{j != k} ||E_j E_k||_F
  double sum = 0;         // ||sum_k E_k - I||_F
  Index min_rank = 0;
};

PartitionDefects partition_defects(const ProjectionPartition& partition);
void validate_partition(const ProjectionPartition& partition, const Tolerances& tol = default_tolerances());

/// sum_k E_k X E_k
ComplexMatrix pinch(const ComplexMatrix& X, const ProjectionPartition& partition);

/// max_k ||E_k X E_k - tau(X) E_k||_F
double block_pinch_residual(const ComplexMatrix& X, const ProjectionPartition& partition);

/// ||diag(U^* X U) - tau(X)||_2, the rank-one pinch residual of X in the basis U.
double diagonal_deviation(const ComplexMatrix& X, const ComplexMatrix& U);

struct UnitaryWitness {
  ComplexMatrix U;
  std::optional<long> order;  // N with U^N = I, when declared
  ProjectionPartition partition;
  double residual = 0;  // max over the operators of the pinch residual
  int rotations = 0;    // plane rotations spent by the exact algorithm
};

/// Unitary U, built from at most n-1 plane rotations, such that U^* H U has
/// every diagonal entry equal to tau(H).
UnitaryWitness equal_diagonal_hermitian(const ComplexMatrix& H,
                                        const Tolerances& tol = default_tolerances());

/// W = sum_j omega^(j-1) E_j with omega = exp(2 pi i / N); W^N = I.
UnitaryWitness dixmier_average_unitary(const ProjectionPartition& partition,
                                       const Tolerances& tol = default_tolerances());

/// ||(1/N) sum_{k<N} W^{*k} X W^k - tau(X) I||_F, summed by doubling over powers of W.
double verify_average(const ComplexMatrix& X, const UnitaryWitness& W);

// ---------------------------------------------------------------------------
// Simultaneous pinching of a family (numerical, certified by residual)

struct SolverConfig {
  int multistart = 20;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  double residual_target = 1e-8;
};

struct PinchProblem {
  std::vector<ComplexMatrix> operators;
  SolverConfig solver;
};

enum class PinchStatus { certified, feasibility_not_certified };

struct PinchResult {
  UnitaryWitness witness;
  PinchStatus status = PinchStatus::feasibility_not_certified;
  bool exact_path = false;  // solved by equal_diagonal_hermitian
  int starts_used = 0;
  int iterations = 0;                    // of the winning start
  std::vector<double> objective_history;  // accepted objective values of the winning start
  std::vector<double> residuals;          // per operator, recomputed from the final U

  bool certified() const { return status == PinchStatus::certified; }
};

/// Objective sum_j ||diag(U^* X_j U) - tau(X_j)||^2.
double pinch_objective(const std::vector<ComplexMatrix>& operators, const ComplexMatrix& U);

PinchResult simultaneous_pinch(const PinchProblem& problem,
                               const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Two-block machinery

struct OffDiagonalSplit {
  ComplexMatrix P1, P2, Q1, Q2;
  Index rank_P1 = 0, rank_P2 = 0, rank_Q1 = 0, rank_Q2 = 0;
};

/// For A = PAQ with P orthogonal to Q, halves P and Q so that P1 A Q2 = P2 A Q1 = 0.
/// With strict = true every piece being halved must have even rank.
OffDiagonalSplit split_offdiagonal(const ComplexMatrix& A, const ComplexMatrix& P,
                                   const ComplexMatrix& Q, bool strict = true,
                                   const Tolerances& tol = default_tolerances());

/// Subdivides the last rank so that alpha * ranks[i] + beta * r[i] = 0 for
/// every i < L - 1. Throws DivisibilityError when no integral answer exists.
std::vector<std::int64_t> refine_partition_for_traces(const std::vector<std::int64_t>& ranks,
                                                      double alpha, double beta);

/// Joint zero-diagonal partition for H = PHQ + QHP and K with PKP = P,
/// QKQ = -Q, rank P = rank Q even.
ProjectionPartition two_block_reduce(const ComplexMatrix& H, const ComplexMatrix& K,
                                     const ComplexMatrix& P, const ComplexMatrix& Q,
                                     const Tolerances& tol = default_tolerances());

}  // namespace dixmier
