#include "dixmier/projections.hpp"

#include <cmath>
#include <sstream>

namespace dixmier {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& A) { return (A + A.adjoint()) / 2.0; }

ComplexMatrix block_diag(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out = ComplexMatrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  out.topLeftCorner(A.rows(), A.cols()) = A;
  out.bottomRightCorner(B.rows(), B.cols()) = B;
  return out;
}

// (1/2) [[I + S, R], [R, I - S]] with R = (I - S^2)^{1/2}.
ComplexMatrix half_angle_projection(const ComplexMatrix& S, const ComplexMatrix& R) {
  const Index m = S.rows();
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  ComplexMatrix P(2 * m, 2 * m);
  P.topLeftCorner(m, m) = I + S;
  P.topRightCorner(m, m) = R;
  P.bottomLeftCorner(m, m) = R;
  P.bottomRightCorner(m, m) = I - S;
  P *= 0.5;
  return hermitian_part(P);
}

}  // namespace

TwoProjectionSum sum_of_two_projections(const ComplexMatrix& T, const Tolerances& tol) {
  require_hermitian(T, "sum_of_two_projections", tol);
  const Index n = T.rows();
  ComplexMatrix B = hermitian_part(T);
  B.diagonal().array() -= 1.0;
  const auto es = hermitian_eig(B, tol);

  for (Index k = 0; k < n; ++k) {
    if (std::abs(es.values(k)) > 1.0 + tol.psd_tol) {
      std::ostringstream os;
      os << "sum_of_two_projections: spectrum of T leaves [0, 2] (T - I has eigenvalue "
         << es.values(k) << ")";
      throw RangeError(os.str());
    }
  }

  std::vector<Index> pos, neg, zero;
  for (Index k = 0; k < n; ++k) {
    const double t = es.values(k);
    if (t > tol.pairing_tol)
      pos.push_back(k);
    else if (t < -tol.pairing_tol)
      neg.insert(neg.begin(), k);  // ascending |t|
    else
      zero.push_back(k);
  }

  TwoProjectionSum out;
  std::vector<double> unmatched;
  std::size_t i = 0, j = 0;
  while (i < pos.size() && j < neg.size()) {
    const double tp = es.values(pos[i]);
    const double tn = -es.values(neg[j]);
    if (std::abs(tp - tn) <= tol.pairing_tol) {
      out.pairing.push_back({0.5 * (tp + tn), pos[i], neg[j]});
      ++i;
      ++j;
    } else if (tp < tn) {
      unmatched.push_back(tp);
      ++i;
    } else {
      unmatched.push_back(-tn);
      ++j;
    }
  }
  for (; i < pos.size(); ++i) unmatched.push_back(es.values(pos[i]));
  for (; j < neg.size(); ++j) unmatched.push_back(es.values(neg[j]));
  if (!unmatched.empty()) {
    std::ostringstream os;
    os << "sum_of_two_projections: spectrum of T - I is not symmetric; unmatched eigenvalues:";
    for (double u : unmatched) os << ' ' << u;
    throw SymmetryError(os.str(), unmatched);
  }
  for (std::size_t z = 0; z + 1 < zero.size(); z += 2) out.pairing.push_back({0.0, zero[z], zero[z + 1]});
  if (zero.size() % 2 == 1) out.pairing.push_back({0.0, zero.back(), -1});

  out.P = ComplexMatrix::Zero(n, n);
  out.Q = ComplexMatrix::Zero(n, n);
  bool lone_to_p = true;
  for (const auto& pr : out.pairing) {
    if (pr.negative < 0) {
      const ComplexVector u = es.vectors.col(pr.positive);
      (lone_to_p ? out.P : out.Q) += u * u.adjoint();
      lone_to_p = !lone_to_p;
      continue;
    }
    const double t = std::clamp(pr.t, 0.0, 1.0);
    const double beta = std::sqrt(std::max(0.0, 1.0 - t * t)) / 2.0;
    ComplexMatrix V(n, 2);
    V.col(0) = es.vectors.col(pr.positive);
    V.col(1) = es.vectors.col(pr.negative);
    Eigen::Matrix2cd p2, q2;
    p2 << (1 + t) / 2, beta, beta, (1 - t) / 2;
    q2 << (1 + t) / 2, -beta, -beta, (1 - t) / 2;
    out.P += V * p2 * V.adjoint();
    out.Q += V * q2 * V.adjoint();
  }
  out.P = hermitian_part(out.P);
  out.Q = hermitian_part(out.Q);
  out.residual = (out.P + out.Q - T).norm();
  return out;
}

TwoProjectionCombination two_projection_combination(const ComplexMatrix& A, const ComplexMatrix& U,
                                                    const Tolerances& tol) {
  require_hermitian(A, "two_projection_combination", tol);
  require_square(U, "two_projection_combination(U)");
  require_same_shape(A, U, "two_projection_combination");
  const Index n = A.rows();
  if (unitarity_defect(U) > 1e-10 * std::sqrt(static_cast<double>(n)))
    throw ContractError("two_projection_combination: U is not unitary");
  const double anorm = A.norm();
  if (std::abs(normalized_trace(A)) > tol.trace_tol * anorm)
    throw ContractError("two_projection_combination: A must have trace zero");

  TwoProjectionCombination out;
  if (anorm == 0.0) {
    out.degenerate = true;
    out.P = ComplexMatrix::Zero(n, n);
    out.Q = ComplexMatrix::Zero(n, n);
    return out;
  }
  if ((A + U.adjoint() * A * U).norm() > 1e-9 * anorm)
    throw ContractError("two_projection_combination: A + U^*AU != 0");

  const ComplexMatrix Ah = hermitian_part(A);
  out.a = op_norm(Ah);
  ComplexMatrix T = Ah / out.a;
  T.diagonal().array() += 1.0;
  const auto sum = sum_of_two_projections(T, tol);
  out.P = sum.P;
  out.b = -out.a;
  out.Q = ComplexMatrix::Identity(n, n) - sum.Q;
  out.residual = (out.a * out.P + out.b * out.Q - A).norm();
  return out;
}

FourProjectionWitness four_projection_combination(const ComplexMatrix& A, const Tolerances& tol) {
  require_hermitian(A, "four_projection_combination", tol);
  const Index n = A.rows();
  if (n % 2 != 0) {
    std::ostringstream os;
    os << "four_projection_combination: dimension " << n
       << " is odd; embed A as A (+) 1 to obtain an even dimension";
    throw DimensionError(os.str());
  }
  const Index m = n / 2;
  const ComplexMatrix Ah = hermitian_part(A);
  const ComplexMatrix Im = ComplexMatrix::Identity(m, m);

  FourProjectionWitness w;
  const double tr = normalized_trace(Ah).real();
  w.trace_zero_variant = !(std::abs(tr) > tol.trace_tol * Ah.norm());
  w.scale = w.trace_zero_variant ? 1.0 : tr;
  w.shift = w.trace_zero_variant ? 0.0 : 1.0;
  const ComplexMatrix An = Ah / w.scale;

  // Split the eigenbasis into sorted halves; An - shift*I = A1 (+) A2 there.
  const auto es = hermitian_eig(An, tol);
  w.E1 = es.vectors.leftCols(m);
  w.E2 = es.vectors.rightCols(m);
  w.A1 = hermitian_part(w.E1.adjoint() * An * w.E1) - w.shift * Im;
  w.A2 = hermitian_part(w.E2.adjoint() * An * w.E2) - w.shift * Im;

  ComplexMatrix sum = w.A1 + w.A2;
  ComplexMatrix X0 = ComplexMatrix::Zero(m, m);
  if (max_abs(sum) > 0) {
    sum.diagonal().array() -= normalized_trace(sum).real();  // exact trace zero up to rounding
    X0 = self_commutator_factorize(sum, tol).X;
  }
  const auto shifted = shift_for_positivity(X0, 3.0);
  w.X = shifted.X;
  w.t = shifted.t;

  const ComplexMatrix XsX = hermitian_part(w.X.adjoint() * w.X);
  const ComplexMatrix XXs = hermitian_part(w.X * w.X.adjoint());
  w.Y = XsX - w.shift * Im;
  w.polar_unitary = polar_decompose(w.X, tol).isometry;

  const auto ey = hermitian_eig(w.Y, tol);
  std::function<double(double)> s1, s2;
  if (w.trace_zero_variant) {
    // diag(Y, -Y) = a (P3 - P4) with S2 = -S1 = -Y/a.
    w.d = op_norm(w.Y) + 1.0;
    w.a = w.d;
    w.b = -w.d;
    const double d = w.d;
    s1 = [d](double y) { return y / d; };
    s2 = [d](double y) { return -y / d; };
  } else {
    w.d = op_norm(w.Y) + 1.0;
    w.a = 1.0 + w.d;
    w.b = 1.0 - w.d;
    const double d = w.d;
    s1 = [d](double y) { return (y + d / y) / (1.0 + d); };
    s2 = [d](double y) { return (-y + d / y) / (d - 1.0); };
  }
  w.S1 = spectral_function(ey, s1);
  w.S2 = spectral_function(ey, s2);
  const ComplexMatrix R1 = spectral_function(ey, [&](double y) { return std::sqrt(std::max(0.0, 1.0 - s1(y) * s1(y))); });
  const ComplexMatrix R2 = spectral_function(ey, [&](double y) { return std::sqrt(std::max(0.0, 1.0 - s2(y) * s2(y))); });
  w.s1_min = w.s2_min = std::numeric_limits<double>::infinity();
  w.s1_max = w.s2_max = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < m; ++k) {
    const double y = ey.values(k);
    w.s1_min = std::min(w.s1_min, s1(y));
    w.s1_max = std::max(w.s1_max, s1(y));
    w.s2_min = std::min(w.s2_min, s2(y));
    w.s2_max = std::max(w.s2_max, s2(y));
  }

  const ComplexMatrix P3 = half_angle_projection(w.S1, R1);
  const ComplexMatrix P4 = half_angle_projection(w.S2, R2);
  ComplexMatrix check = w.a * P3 + w.b * P4 - block_diag(w.Y, -w.Y);
  check.diagonal().array() -= w.shift;
  if (check.norm() > 1e-8) {
    std::ostringstream os;
    os << "four_projection_combination: a*P3 + b*P4 does not reproduce diag(Y, -Y) (error "
       << check.norm() << ", S1 in [" << w.s1_min << ", " << w.s1_max << "], S2 in [" << w.s2_min
       << ", " << w.s2_max << "])";
    throw InternalConsistencyError(os.str());
  }

  const ComplexMatrix oneS1 = Im - w.S1 * w.S1;
  const ComplexMatrix oneS2 = Im - w.S2 * w.S2;
  w.offdiagonal_identity = (w.a * w.a * oneS1 - w.b * w.b * oneS2).norm() /
                           std::max(w.a * w.a * oneS1.norm(), std::numeric_limits<double>::min());
  ComplexMatrix diag_check = (w.a * (Im + w.S1) + w.b * (Im + w.S2)) / 2.0 - w.Y;
  diag_check.diagonal().array() -= w.shift;
  w.diagonal_identity = diag_check.norm() / std::max(w.Y.norm(), std::numeric_limits<double>::min());

  const ComplexMatrix Wc = block_diag(Im, w.polar_unitary);
  const ComplexMatrix P3c = hermitian_part(Wc * P3 * Wc.adjoint());
  const ComplexMatrix P4c = hermitian_part(Wc * P4 * Wc.adjoint());

  // Remainder diag(-XX^* - A2 + shift, XX^* + A2 - shift) is odd under the block swap.
  ComplexMatrix M1 = -XXs - w.A2;
  M1.diagonal().array() += w.shift;
  const ComplexMatrix M = hermitian_part(block_diag(M1, -M1));
  ComplexMatrix swap = ComplexMatrix::Zero(n, n);
  swap.topRightCorner(m, m) = Im;
  swap.bottomLeftCorner(m, m) = Im;
  const auto tp = two_projection_combination(M, swap, tol);
  w.lambda = tp.a;

  ComplexMatrix Phi(n, n);
  Phi.leftCols(m) = w.E1;
  Phi.rightCols(m) = w.E2;
  auto transport = [&](const ComplexMatrix& P) { return hermitian_part(Phi * P * Phi.adjoint()); };
  w.projections = {transport(P3c), transport(P4c), transport(tp.P), transport(tp.Q)};
  w.coefficients = {w.scale * w.a, w.scale * w.b, w.scale * w.lambda, -w.scale * w.lambda};

  ComplexMatrix rebuilt = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < 4; ++k) {
    rebuilt += w.coefficients[k] * w.projections[k];
    w.projection_residuals[k] = projection_defect(w.projections[k]);
  }
  w.residual = (rebuilt - A).norm();
  return w;
}

}  // namespace dixmier
