#include <doctest.h>

#include "dixmier/commutators.hpp"
#include "oracles.hpp"

using namespace dixmier;

namespace {

ComplexMatrix swap2() {
  ComplexMatrix A(2, 2);
  A << 0, 1, 1, 0;
  return A;
}

ComplexMatrix diag2(cd a, cd b) {
  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

ComplexMatrix naive_commutator(const ComplexMatrix& B, const ComplexMatrix& C) {
  return oracle::add(oracle::matmul(B, C), oracle::matmul(C, B), -1.0);
}

ComplexMatrix naive_self_commutator(const ComplexMatrix& X) {
  return oracle::add(oracle::matmul(oracle::adjoint(X), X), oracle::matmul(X, oracle::adjoint(X)), -1.0);
}

}  // namespace

TEST_CASE("commutator_factorize") {
  SUBCASE("2x2 swap") {
    const auto w = commutator_factorize(swap2());
    ComplexMatrix B(2, 2);
    B << 0, -0.5, 0.5, 0;
    CHECK((w.B - B).norm() <= 1e-15);
    CHECK((w.C - diag2(1, -1)).norm() <= 1e-15);
    CHECK(naive_commutator(w.B, w.C) == swap2());
    CHECK(w.status == WitnessStatus::pass);
    CHECK(w.exact_route);
  }
  SUBCASE("zero") {
    const auto w = commutator_factorize(ComplexMatrix::Zero(3, 3));
    CHECK(w.B.norm() == 0.0);
    CHECK(w.residual == 0.0);
    CHECK(std::abs(w.C(1, 1) - root_of_unity(1, 3)) <= 1e-15);
  }
  SUBCASE("random Hermitian trace-zero") {
    for (Index n : {4, 16}) {
      const ComplexMatrix A = random_hermitian_trace_zero(n, 7);
      const auto w = commutator_factorize(A);
      CHECK(oracle::fro(oracle::add(naive_commutator(w.B, w.C), A, -1.0)) <= 1e-9 * A.norm());
      ComplexMatrix Cn = oracle::identity(n);
      for (Index k = 0; k < n; ++k) Cn = oracle::matmul(Cn, w.C);
      CHECK(oracle::fro(oracle::add(Cn, oracle::identity(n), -1.0)) <= 1e-10);
      // Entries of B in the witness basis respect the conditioning bound.
      const ComplexMatrix Bt = w.basis.U.adjoint() * w.B * w.basis.U;
      CHECK(Bt.cwiseAbs().maxCoeff() <= w.entry_bound * (1 + 1e-12));
    }
  }
  SUBCASE("general trace-zero") {
    const ComplexMatrix A = random_trace_zero(6, 3);
    const auto w = commutator_factorize(A);
    CHECK(!w.exact_route);
    CHECK(w.status == WitnessStatus::pass);
    CHECK(oracle::fro(oracle::add(naive_commutator(w.B, w.C), A, -1.0)) <= 1e-7 * A.norm());
  }
  SUBCASE("solver budget exhausted") {
    SolverConfig cfg;
    cfg.multistart = 1;
    cfg.max_iterations = 0;
    const auto w = commutator_factorize(random_trace_zero(6, 3), cfg);
    CHECK(w.status == WitnessStatus::feasibility_not_certified);
    CHECK(w.residual > 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(commutator_factorize(ComplexMatrix::Identity(2, 2)), ContractError);
    CHECK_THROWS_AS(commutator_factorize(ComplexMatrix::Zero(2, 3)), DimensionError);
  }
}

TEST_CASE("self_commutator_factorize") {
  SUBCASE("2x2 swap") {
    const auto w = self_commutator_factorize(swap2());
    ComplexMatrix D(2, 2);
    D << 0, 0.5, 0.5, 0;
    CHECK((w.D - D).norm() <= 1e-15);
    CHECK(w.lambda == doctest::Approx(0.5 + kLambdaMargin));
    ComplexMatrix shifted = D;
    shifted.diagonal().array() += w.lambda;
    const ComplexMatrix X = diag2(1, -1) * psd_sqrt(shifted);
    CHECK((w.X - X).norm() <= 1e-14);
    CHECK(oracle::fro(oracle::add(naive_self_commutator(w.X), swap2(), -1.0)) <= 1e-12);
  }
  SUBCASE("zero") {
    const auto w = self_commutator_factorize(ComplexMatrix::Zero(3, 3));
    CHECK(w.D.norm() == 0.0);
    CHECK(w.lambda == kLambdaMargin);
    CHECK((w.X - std::sqrt(w.lambda) * w.C).norm() <= 1e-15);
    CHECK(w.residual <= 1e-15);
  }
  SUBCASE("random Hermitian trace-zero") {
    for (Index n : {4, 32}) {
      const ComplexMatrix A = random_hermitian_trace_zero(n, 5);
      const auto w = self_commutator_factorize(A);
      CHECK(oracle::fro(oracle::add(naive_self_commutator(w.X), A, -1.0)) <= 1e-9 * A.norm());
      const ComplexMatrix inter =
          oracle::add(oracle::add(w.D, oracle::matmul(oracle::matmul(w.C, w.D), oracle::adjoint(w.C)), -1.0), A, -1.0);
      CHECK(oracle::fro(inter) <= 1e-10 * (1 + A.norm()));
      CHECK(w.status == WitnessStatus::pass);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(self_commutator_factorize(random_trace_zero(3, 1)), ContractError);
    CHECK_THROWS_AS(self_commutator_factorize(random_hermitian(3, 1)), ContractError);
  }
}

TEST_CASE("shift_for_positivity") {
  SUBCASE("zero") {
    const auto s = shift_for_positivity(ComplexMatrix::Zero(3, 3), 3.0);
    CHECK(s.t == doctest::Approx(std::sqrt(3.0) + 1));
    CHECK((s.X.adjoint() * s.X - s.t * s.t * ComplexMatrix::Identity(3, 3)).norm() <= 1e-14);
  }
  SUBCASE("unit-norm Hermitian") {
    ComplexMatrix X0 = random_hermitian(5, 2);
    X0 /= op_norm(X0);
    const auto s = shift_for_positivity(X0, 3.0);
    Eigen::JacobiSVD<ComplexMatrix> svd(s.X);
    CHECK(svd.singularValues().minCoeff() >= std::sqrt(3.0));
  }
  SUBCASE("self-commutator is unchanged") {
    const ComplexMatrix X0 = random_gaussian(8, 8, 6);
    const auto s = shift_for_positivity(X0, 3.0);
    const ComplexMatrix diff = oracle::add(naive_self_commutator(s.X), naive_self_commutator(X0), -1.0);
    CHECK(oracle::fro(diff) <= 1e-11 * X0.squaredNorm());
    const auto es = hermitian_eig(ComplexMatrix(s.X.adjoint() * s.X));
    CHECK(es.values(0) > 3.0);
  }
  CHECK_THROWS_AS(shift_for_positivity(ComplexMatrix::Zero(2, 2), 0.0), ContractError);
}
