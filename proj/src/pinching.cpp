#include "dixmier/pinching.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dixmier {

cd root_of_unity(long k, long N) {
  if (N <= 0) throw DimensionError("root_of_unity: order must be positive");
  k %= N;
  if (k < 0) k += N;
  if ((4 * k) % N == 0) {
    switch ((4 * k) / N) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N);
  return {std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// ProjectionPartition

Index ProjectionPartition::offset(std::size_t k) const {
  return std::accumulate(block_sizes.begin(), block_sizes.begin() + static_cast<std::ptrdiff_t>(k),
                         Index(0));
}

ComplexMatrix ProjectionPartition::block_basis(std::size_t k) const {
  return basis.middleCols(offset(k), block_sizes.at(k));
}

ComplexMatrix ProjectionPartition::projection(std::size_t k) const {
  const ComplexMatrix B = block_basis(k);
  return B * B.adjoint();
}

ProjectionPartition ProjectionPartition::rank_one(const ComplexMatrix& U) {
  require_square(U, "ProjectionPartition::rank_one");
  ProjectionPartition p;
  p.basis = U;
  p.block_sizes.assign(static_cast<std::size_t>(U.cols()), 1);
  return p;
}

ProjectionPartition ProjectionPartition::from_projections(const std::vector<ComplexMatrix>& projections,
                                                          std::vector<std::string> labels,
                                                          const Tolerances& tol) {
  if (projections.empty()) throw ContractError("partition: no projections given");
  const Index n = projections.front().rows();
  for (const auto& E : projections) {
    require_square(E, "partition");
    if (E.rows() != n) throw DimensionError("partition: projections of different sizes");
  }
  ProjectionPartition p;
  p.basis.resize(n, n);
  Index filled = 0;
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const ComplexMatrix& E = projections[k];
    if (projection_defect(E) > tol.proj_tol) {
      std::ostringstream os;
      os << "partition: part " << k << " is not a projection (defect " << projection_defect(E) << ")";
      throw ContractError(os.str());
    }
    for (std::size_t j = 0; j < k; ++j)
      if ((E * projections[j]).norm() > tol.proj_tol)
        throw ContractError("partition: parts " + std::to_string(j) + " and " + std::to_string(k) +
                            " are not orthogonal");
    const ComplexMatrix B = projection_basis(E, tol);
    if (B.cols() == 0) throw ContractError("partition: part " + std::to_string(k) + " is zero");
    if (filled + B.cols() > n) throw ContractError("partition: ranks exceed the dimension");
    p.basis.middleCols(filled, B.cols()) = B;
    p.block_sizes.push_back(B.cols());
    filled += B.cols();
    sum += E;
  }
  if (filled != n || (sum - ComplexMatrix::Identity(n, n)).norm() > tol.proj_tol)
    throw ContractError("partition: projections do not sum to the identity");
  p.labels = std::move(labels);
  return p;
}

PartitionDefects partition_defects(const ProjectionPartition& partition) {
  // With E_k = B_k B_k^* and G = B^* B, every product E_j X E_k reduces to
  // small blocks: ||B_j X B_k^*||_F^2 = tr(X^* G_jj X G_kk).
  PartitionDefects d;
  const Index n = partition.dimension();
  const std::size_t N = partition.parts();
  const ComplexMatrix G = partition.basis.adjoint() * partition.basis;
  auto block = [&](std::size_t j, std::size_t k) {
    return G.block(partition.offset(j), partition.offset(k), partition.block_sizes[j], partition.block_sizes[k]);
  };
  auto sandwiched_norm = [&](std::size_t j, const ComplexMatrix& X, std::size_t k) {
    const ComplexMatrix Gj = block(j, j), Gk = block(k, k);
    return std::sqrt(std::max(0.0, (X.adjoint() * Gj * X * Gk).trace().real()));
  };
  d.min_rank = n;
  for (std::size_t k = 0; k < N; ++k) {
    const ComplexMatrix Ek = partition.projection(k);
    d.hermitian = std::max(d.hermitian, (Ek - Ek.adjoint()).norm());
    ComplexMatrix excess = block(k, k);
    excess.diagonal().array() -= 1.0;
    d.idempotent = std::max(d.idempotent, sandwiched_norm(k, excess, k));
    d.min_rank = std::min(d.min_rank, partition.block_sizes[k]);
    for (std::size_t j = 0; j < N; ++j)
      if (j != k) d.cross = std::max(d.cross, sandwiched_norm(j, block(j, k), k));
  }
  d.sum = (partition.basis * partition.basis.adjoint() - ComplexMatrix::Identity(n, n)).norm();
  return d;
}

void validate_partition(const ProjectionPartition& partition, const Tolerances& tol) {
  if (partition.parts() == 0) throw ContractError("partition: empty");
  const Index total =
      std::accumulate(partition.block_sizes.begin(), partition.block_sizes.end(), Index(0));
  if (partition.basis.rows() != partition.basis.cols() || total != partition.dimension())
    throw ContractError("partition: block sizes do not cover the dimension");
  const auto d = partition_defects(partition);
  if (d.min_rank < 1) throw ContractError("partition: contains a zero projection");
  if (std::max({d.idempotent, d.hermitian, d.cross, d.sum}) > tol.proj_tol) {
    std::ostringstream os;
    os << "partition: invalid (idempotent " << d.idempotent << ", hermitian " << d.hermitian
       << ", cross " << d.cross << ", sum " << d.sum << ")";
    throw ContractError(os.str());
  }
}

ComplexMatrix pinch(const ComplexMatrix& X, const ProjectionPartition& partition) {
  require_square(X, "pinch");
  if (X.rows() != partition.dimension()) throw DimensionError("pinch: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(X.rows(), X.cols());
  for (std::size_t k = 0; k < partition.parts(); ++k) {
    const ComplexMatrix B = partition.block_basis(k);
    out += B * (B.adjoint() * X * B) * B.adjoint();
  }
  return out;
}

double block_pinch_residual(const ComplexMatrix& X, const ProjectionPartition& partition) {
  require_square(X, "block_pinch_residual");
  if (X.rows() != partition.dimension()) throw DimensionError("block_pinch_residual: dimension mismatch");
  const cd t = normalized_trace(X);
  double worst = 0;
  for (std::size_t k = 0; k < partition.parts(); ++k) {
    const ComplexMatrix B = partition.block_basis(k);
    // ||B (B^*XB - t) B^*||_F = ||B^*XB - t||_F since B has orthonormal columns.
    ComplexMatrix C = B.adjoint() * X * B;
    C.diagonal().array() -= t;
    worst = std::max(worst, C.norm());
  }
  return worst;
}

double diagonal_deviation(const ComplexMatrix& X, const ComplexMatrix& U) {
  require_square(X, "diagonal_deviation");
  require_same_shape(X, U, "diagonal_deviation");
  const cd t = normalized_trace(X);
  double s = 0;
  for (Index k = 0; k < X.rows(); ++k) {
    const cd d = U.col(k).dot(X * U.col(k));
    s += std::norm(d - t);
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Exact equal-diagonal conjugation

UnitaryWitness equal_diagonal_hermitian(const ComplexMatrix& H, const Tolerances& tol) {
  require_hermitian(H, "equal_diagonal_hermitian", tol);
  const Index n = H.rows();
  ComplexMatrix M = (H + H.adjoint()) / 2.0;
  ComplexMatrix U = ComplexMatrix::Identity(n, n);
  const double mu = normalized_trace(M).real();
  const double norm = M.norm();
  // Entries within this distance of mu count as pinned.
  const double settle = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + norm);

  UnitaryWitness w;
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  Index remaining = n;
  while (norm > 0 && remaining > 1) {
    Index i = -1, j = -1;
    for (Index k = 0; k < n; ++k) {
      if (!active[static_cast<std::size_t>(k)]) continue;
      if (i < 0 || M(k, k).real() > M(i, i).real()) i = k;
      if (j < 0 || M(k, k).real() < M(j, j).real()) j = k;
    }
    const double a = M(i, i).real() - mu;
    const double b = M(j, j).real() - mu;
    if (a <= settle && -b <= settle) break;
    if (a <= 0 || b >= 0) break;

    // Column i becomes c e_i + s e^{i psi} e_j with e^{i psi} h_ij = |h_ij|;
    // t = tan(theta) is the positive root of a + 2 t r + t^2 b = 0.
    const cd hij = M(i, j);
    const double r = std::abs(hij);
    const cd phase = r > 0 ? std::conj(hij) / r : cd(1.0);
    const double t = (r + std::sqrt(r * r - a * b)) / (-b);
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cd gii = c, gji = s * phase, gij = -s * std::conj(phase), gjj = c;

    for (Index k = 0; k < n; ++k) {
      const cd mi = M(k, i), mj = M(k, j);
      M(k, i) = mi * gii + mj * gji;
      M(k, j) = mi * gij + mj * gjj;
    }
    for (Index k = 0; k < n; ++k) {
      const cd mi = M(i, k), mj = M(j, k);
      M(i, k) = std::conj(gii) * mi + std::conj(gji) * mj;
      M(j, k) = std::conj(gij) * mi + std::conj(gjj) * mj;
    }
    for (Index k = 0; k < n; ++k) {
      const cd ui = U(k, i), uj = U(k, j);
      U(k, i) = ui * gii + uj * gji;
      U(k, j) = ui * gij + uj * gjj;
    }
    active[static_cast<std::size_t>(i)] = false;
    --remaining;
    ++w.rotations;
  }

  w.U = U;
  w.partition = ProjectionPartition::rank_one(U);
  w.residual = diagonal_deviation(H, U);
  return w;
}

// ---------------------------------------------------------------------------
// Averaging unitary

UnitaryWitness dixmier_average_unitary(const ProjectionPartition& partition, const Tolerances& tol) {
  validate_partition(partition, tol);
  const auto N = static_cast<long>(partition.parts());
  const Index n = partition.dimension();
  ComplexVector phases(n);
  for (std::size_t k = 0; k < partition.parts(); ++k)
    phases.segment(partition.offset(k), partition.block_sizes[k]).setConstant(
        root_of_unity(static_cast<long>(k), N));

  UnitaryWitness w;
  w.U = partition.basis * phases.asDiagonal() * partition.basis.adjoint();
  w.order = N;
  w.partition = partition;
  w.residual = 0;
  return w;
}

double verify_average(const ComplexMatrix& X, const UnitaryWitness& W) {
  if (!W.order) throw ContractError("verify_average: witness has no declared order");
  require_square(X, "verify_average");
  require_same_shape(X, W.U, "verify_average");
  const long N = *W.order;
  if (N <= 0) throw ContractError("verify_average: order must be positive");
  // S_m = sum_{k<m} W^{*k} X W^k built from the bits of N:
  // S_2m = S_m + (W^m)^* S_m W^m and S_{m+1} = S_m + (W^m)^* X W^m.
  const Index n = X.rows();
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  ComplexMatrix Wm = ComplexMatrix::Identity(n, n);
  int bit = 0;
  while ((N >> (bit + 1)) != 0) ++bit;
  for (; bit >= 0; --bit) {
    acc += (Wm.adjoint() * acc * Wm).eval();
    Wm = (Wm * Wm).eval();
    if ((N >> bit) & 1L) {
      acc += Wm.adjoint() * X * Wm;
      Wm = (Wm * W.U).eval();
    }
  }
  acc /= static_cast<double>(N);
  acc.diagonal().array() -= normalized_trace(X);
  return acc.norm();
}

// ---------------------------------------------------------------------------
// Simultaneous pinching by descent on the unitary group

namespace {

// Hermitian parts of the family, each shifted to trace zero.
std::vector<ComplexMatrix> centered_hermitian_parts(const std::vector<ComplexMatrix>& ops) {
  std::vector<ComplexMatrix> parts;
  for (const auto& X : ops) {
    ComplexMatrix re = (X + X.adjoint()) / 2.0;
    ComplexMatrix im = (X - X.adjoint()) / cd(0.0, 2.0);
    re = (re + re.adjoint()).eval() / 2.0;
    im = (im + im.adjoint()).eval() / 2.0;
    re.diagonal().array() -= normalized_trace(re).real();
    im.diagonal().array() -= normalized_trace(im).real();
    parts.push_back(std::move(re));
    parts.push_back(std::move(im));
  }
  return parts;
}

double objective(const std::vector<ComplexMatrix>& parts, const ComplexMatrix& U) {
  double f = 0;
  for (const auto& H : parts) {
    const ComplexMatrix M = U.adjoint() * H * U;
    for (Index k = 0; k < M.rows(); ++k) f += M(k, k).real() * M(k, k).real();
  }
  return f;
}

// Riemannian gradient in the left-trivialized tangent space: G = 2 sum [M, diag M].
ComplexMatrix gradient(const std::vector<ComplexMatrix>& parts, const ComplexMatrix& U) {
  const Index n = U.rows();
  ComplexMatrix G = ComplexMatrix::Zero(n, n);
  for (const auto& H : parts) {
    const ComplexMatrix M = U.adjoint() * H * U;
    const ComplexVector d = M.diagonal().real().cast<cd>();
    // [M, D]_kj = M_kj (d_j - d_k)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) G(k, j) += 2.0 * M(k, j) * (d(j) - d(k));
  }
  return (G - G.adjoint()) / 2.0;
}

ComplexMatrix cayley(const ComplexMatrix& Omega, double t) {
  const Index n = Omega.rows();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  const ComplexMatrix half = (t / 2.0) * Omega;
  return (I - half).partialPivLu().solve(I + half);
}

double family_residual(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& U,
                       std::vector<double>* per_op = nullptr) {
  double worst = 0;
  if (per_op) per_op->clear();
  for (const auto& X : ops) {
    const double r = diagonal_deviation(X, U);
    if (per_op) per_op->push_back(r);
    worst = std::max(worst, r);
  }
  return worst;
}

struct Descent {
  ComplexMatrix U;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> history;
};

Descent descend(const std::vector<ComplexMatrix>& ops, const std::vector<ComplexMatrix>& parts,
                ComplexMatrix U, const SolverConfig& cfg) {
  Descent run;
  double f = objective(parts, U);
  run.history.push_back(f);
  double residual = family_residual(ops, U);
  int it = 0;
  for (; it < cfg.max_iterations && residual > cfg.residual_target; ++it) {
    const ComplexMatrix G = gradient(parts, U);
    const double g2 = G.squaredNorm();
    if (!(g2 > 0)) break;
    const ComplexMatrix Omega = -G;
    double t = cfg.initial_step;
    bool accepted = false;
    while (t > 1e-20) {
      const ComplexMatrix trial = U * cayley(Omega, t);
      const double ft = objective(parts, trial);
      if (ft <= f - cfg.armijo_c * t * g2) {
        U = trial;
        f = ft;
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) break;
    run.history.push_back(f);
    residual = family_residual(ops, U);
  }
  // Remove rounding drift from the product of Cayley factors.
  U = polar_decompose(U).isometry;
  run.U = std::move(U);
  run.residual = family_residual(ops, run.U);
  run.iterations = it;
  return run;
}

}  // namespace

double pinch_objective(const std::vector<ComplexMatrix>& operators, const ComplexMatrix& U) {
  double f = 0;
  for (const auto& X : operators) {
    const double r = diagonal_deviation(X, U);
    f += r * r;
  }
  return f;
}

PinchResult simultaneous_pinch(const PinchProblem& problem, const Tolerances& tol) {
  const auto& ops = problem.operators;
  const auto& cfg = problem.solver;
  if (ops.empty()) throw ContractError("simultaneous_pinch: no operators");
  const Index n = ops.front().rows();
  for (const auto& X : ops) {
    require_square(X, "simultaneous_pinch");
    if (X.rows() != n) throw ContractError("simultaneous_pinch: operators have different sizes");
    if (!all_finite(X)) throw ContractError("simultaneous_pinch: non-finite entries");
  }
  if (cfg.multistart < 1 || cfg.max_iterations < 0)
    throw ContractError("simultaneous_pinch: invalid solver configuration");

  auto finish = [&](PinchResult& out) {
    out.witness.partition = ProjectionPartition::rank_one(out.witness.U);
    out.witness.residual = family_residual(ops, out.witness.U, &out.residuals);
    return out;
  };

  PinchResult out;
  const auto parts_all = centered_hermitian_parts(ops);
  std::vector<ComplexMatrix> parts;
  double scale = 0;
  for (const auto& H : parts_all) scale = std::max(scale, H.norm());
  for (const auto& H : parts_all)
    if (H.norm() > 64.0 * std::numeric_limits<double>::epsilon() * scale) parts.push_back(H);

  // One non-scalar Hermitian direction: the exact algorithm applies.
  if (parts.size() == 1) {
    auto exact = equal_diagonal_hermitian(parts.front(), tol);
    out.witness.U = exact.U;
    out.witness.rotations = exact.rotations;
    out.exact_path = true;
    finish(out);
    const double bound = 1e-10 * (1.0 + parts.front().norm());
    out.status = out.witness.residual <= std::max(bound, cfg.residual_target)
                     ? PinchStatus::certified
                     : PinchStatus::feasibility_not_certified;
    return out;
  }

  out.witness.U = ComplexMatrix::Identity(n, n);
  out.objective_history = {objective(parts, out.witness.U)};
  if (family_residual(ops, out.witness.U) <= cfg.residual_target) {
    out.status = PinchStatus::certified;
    return finish(out);
  }

  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < cfg.multistart; ++s) {
    const ComplexMatrix U0 = random_unitary(n, cfg.seed + static_cast<std::uint64_t>(s));
    Descent run = descend(ops, parts, U0, cfg);
    out.starts_used = s + 1;
    if (run.residual < best) {
      best = run.residual;
      out.witness.U = std::move(run.U);
      out.iterations = run.iterations;
      out.objective_history = std::move(run.history);
    }
    if (best <= cfg.residual_target) break;
  }
  finish(out);
  out.status = out.witness.residual <= cfg.residual_target ? PinchStatus::certified
                                                           : PinchStatus::feasibility_not_certified;
  return out;
}

// ---------------------------------------------------------------------------
// Off-diagonal splitting and trace refinement

namespace {

ComplexMatrix span_projection(const ComplexMatrix& B) { return B * B.adjoint(); }

void check_projection(const ComplexMatrix& P, const char* name, const Tolerances& tol) {
  if (projection_defect(P) > tol.proj_tol)
    throw ContractError(std::string(name) + " is not a projection");
}

// Orthonormal basis of the part of span(P) orthogonal to the columns of B.
ComplexMatrix complement_basis(const ComplexMatrix& P, const ComplexMatrix& B, const Tolerances& tol) {
  ComplexMatrix R = P;
  if (B.cols() > 0) R -= span_projection(B);
  R = (R + R.adjoint()).eval() / 2.0;
  return projection_basis(R, tol);
}

void require_even(Index rank, const char* what) {
  if (rank % 2 != 0) {
    std::ostringstream os;
    os << "rank of " << what << " is " << rank << ", which cannot be split into equal halves";
    throw DivisibilityError(os.str());
  }
}

ComplexMatrix join(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() > 0 ? A.rows() : B.rows(), A.cols() + B.cols());
  if (A.cols() > 0) out.leftCols(A.cols()) = A;
  if (B.cols() > 0) out.rightCols(B.cols()) = B;
  return out;
}

}  // namespace

OffDiagonalSplit split_offdiagonal(const ComplexMatrix& A, const ComplexMatrix& P,
                                   const ComplexMatrix& Q, bool strict, const Tolerances& tol) {
  require_square(A, "split_offdiagonal");
  require_same_shape(A, P, "split_offdiagonal");
  require_same_shape(A, Q, "split_offdiagonal");
  check_projection(P, "P", tol);
  check_projection(Q, "Q", tol);
  if ((P * Q).norm() > tol.proj_tol) throw ContractError("split_offdiagonal: P and Q are not orthogonal");
  const double anorm = A.norm();
  if ((A - P * A * Q).norm() > 1e-10 * anorm)
    throw ContractError("split_offdiagonal: A is not of the form PAQ");

  const auto polar = polar_decompose(A, tol);
  const Index r = numerical_rank(A, tol);
  const auto es = hermitian_eig(polar.modulus, tol);
  // Eigenvectors of |A| for its r non-zero eigenvalues span R(A*).
  const ComplexMatrix range_q = es.vectors.rightCols(r);
  const ComplexMatrix range_p = polar.isometry * range_q;
  const ComplexMatrix rest_q = complement_basis(Q, range_q, tol);
  const ComplexMatrix rest_p = complement_basis(P, range_p, tol);

  if (strict) {
    require_even(r, "R(A*)");
    require_even(rest_q.cols(), "Q - R(A*)");
    require_even(rest_p.cols(), "P - R(A)");
  }
  const Index h = r / 2;
  const Index hq = rest_q.cols() / 2;
  const Index hp = rest_p.cols() / 2;

  const ComplexMatrix q1 = join(rest_q.leftCols(hq), range_q.leftCols(h));
  const ComplexMatrix q2 = join(rest_q.rightCols(rest_q.cols() - hq), range_q.rightCols(r - h));
  const ComplexMatrix p1 = join(rest_p.leftCols(hp), range_p.leftCols(h));
  const ComplexMatrix p2 = join(rest_p.rightCols(rest_p.cols() - hp), range_p.rightCols(r - h));

  OffDiagonalSplit out;
  const Index n = A.rows();
  auto proj = [n](const ComplexMatrix& B) {
    return B.cols() == 0 ? ComplexMatrix(ComplexMatrix::Zero(n, n)) : span_projection(B);
  };
  out.P1 = proj(p1);
  out.P2 = proj(p2);
  out.Q1 = proj(q1);
  out.Q2 = proj(q2);
  out.rank_P1 = p1.cols();
  out.rank_P2 = p2.cols();
  out.rank_Q1 = q1.cols();
  out.rank_Q2 = q2.cols();
  return out;
}

std::vector<std::int64_t> refine_partition_for_traces(const std::vector<std::int64_t>& ranks,
                                                      double alpha, double beta) {
  if (ranks.size() < 2) throw ContractError("refine_partition_for_traces: need at least two ranks");
  for (auto r : ranks)
    if (r <= 0) throw ContractError("refine_partition_for_traces: ranks must be positive");
  if (beta == 0.0 || !std::isfinite(alpha) || !std::isfinite(beta))
    throw ContractError("refine_partition_for_traces: beta must be finite and non-zero");

  const std::size_t L = ranks.size();
  const std::int64_t last = ranks.back();
  std::vector<double> exact(L - 1);
  std::vector<std::int64_t> pieces(L - 1);
  bool integral = true;
  double total = 0;
  for (std::size_t i = 0; i + 1 < L; ++i) {
    exact[i] = -alpha * static_cast<double>(ranks[i]) / beta;
    total += exact[i];
    const double rounded = std::round(exact[i]);
    if (std::abs(exact[i] - rounded) > 1e-9 * std::max(1.0, std::abs(exact[i])) || rounded < 0)
      integral = false;
    pieces[i] = static_cast<std::int64_t>(rounded);
  }

  // Smallest dimension multiplier that would make the fractional pieces integral.
  auto multiplier = [&]() -> long {
    for (long q = 1; q <= 100000; ++q) {
      bool ok = true;
      for (double x : exact)
        if (std::abs(x * q - std::round(x * q)) > 1e-9 * std::max(1.0, std::abs(x * q))) {
          ok = false;
          break;
        }
      if (ok) return q;
    }
    return 0;
  };

  if (std::abs(total - static_cast<double>(last)) > 1e-9 * std::max(1.0, std::abs(total))) {
    std::ostringstream os;
    os << "refine_partition_for_traces: the pieces need total rank " << total << " but the last part has rank "
       << last << " (shortfall " << total - static_cast<double>(last) << ")";
    throw DivisibilityError(os.str(), exact, multiplier());
  }
  for (double x : exact)
    if (x < -1e-12) throw DivisibilityError("refine_partition_for_traces: negative piece required", exact, 0);
  if (!integral) {
    const long q = multiplier();
    std::ostringstream os;
    os << "refine_partition_for_traces: no integral subdivision; rational pieces (";
    for (std::size_t i = 0; i < exact.size(); ++i) os << (i ? ", " : "") << exact[i];
    os << ") become integral after scaling the dimension by " << q;
    throw DivisibilityError(os.str(), exact, q);
  }
  std::int64_t sum = 0;
  for (auto p : pieces) sum += p;
  if (sum != last) throw DivisibilityError("refine_partition_for_traces: rounding mismatch", exact, 0);
  return pieces;
}

// ---------------------------------------------------------------------------
// Two-block pipeline

ProjectionPartition two_block_reduce(const ComplexMatrix& H, const ComplexMatrix& K,
                                     const ComplexMatrix& P, const ComplexMatrix& Q,
                                     const Tolerances& tol) {
  require_hermitian(H, "two_block_reduce(H)", tol);
  require_hermitian(K, "two_block_reduce(K)", tol);
  require_same_shape(H, K, "two_block_reduce");
  require_same_shape(H, P, "two_block_reduce");
  require_same_shape(H, Q, "two_block_reduce");
  check_projection(P, "P", tol);
  check_projection(Q, "Q", tol);
  const Index n = H.rows();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  if ((P * Q).norm() > tol.proj_tol || (P + Q - I).norm() > tol.proj_tol)
    throw ContractError("two_block_reduce: P and Q must be complementary orthogonal projections");

  const ComplexMatrix bP = projection_basis(P, tol);
  const ComplexMatrix bQ = projection_basis(Q, tol);
  if (bP.cols() != bQ.cols()) throw ContractError("two_block_reduce: rank(P) != rank(Q)");
  const Index m = bP.cols();
  require_even(m, "P");

  const double block_tol = 1e-10;
  if ((bP.adjoint() * H * bP).norm() > block_tol * (1.0 + H.norm()) ||
      (bQ.adjoint() * H * bQ).norm() > block_tol * (1.0 + H.norm()))
    throw ContractError("two_block_reduce: H has non-zero diagonal blocks");
  const ComplexMatrix Im = ComplexMatrix::Identity(m, m);
  if ((bP.adjoint() * K * bP - Im).norm() > block_tol * (1.0 + K.norm()) ||
      (bQ.adjoint() * K * bQ + Im).norm() > block_tol * (1.0 + K.norm()))
    throw ContractError("two_block_reduce: K must compress to +1 on P and -1 on Q");

  // Absorb the polar unitary of D = P H Q, then diagonalize |D|.
  const ComplexMatrix D = bP.adjoint() * H * bQ;
  const auto polar = polar_decompose(D, tol);
  const auto es = hermitian_eig(polar.modulus, tol);
  const ComplexMatrix pBasis = bP * polar.isometry * es.vectors;
  const ComplexMatrix qBasis = bQ * es.vectors;
  const Index h = m / 2;

  // H couples the first halves with each other and the second halves with
  // each other, so (P_a, Q_b) and (Q_a, P_b) are H-free corners on which K
  // has trace zero.
  const ComplexMatrix g1 = join(pBasis.leftCols(h), qBasis.rightCols(m - h));
  const ComplexMatrix g2 = join(qBasis.leftCols(h), pBasis.rightCols(m - h));

  ProjectionPartition out;
  out.basis.resize(n, n);
  Index col = 0;
  for (const ComplexMatrix* g : {&g1, &g2}) {
    if (g->cols() == 0) continue;
    ComplexMatrix corner = g->adjoint() * K * *g;
    corner = (corner + corner.adjoint()).eval() / 2.0;
    const auto w = equal_diagonal_hermitian(corner, tol);
    out.basis.middleCols(col, g->cols()) = *g * w.U;
    col += g->cols();
  }
  out.block_sizes.assign(static_cast<std::size_t>(n), 1);
  return out;
}

}  // namespace dixmier
