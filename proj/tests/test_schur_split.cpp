#include <doctest.h>

#include "dixmier/schur_split.hpp"
#include "oracles.hpp"

using namespace dixmier;

namespace {

ComplexMatrix jordan() {
  ComplexMatrix X(2, 2);
  X << 1, 2, 0, 1;
  return X;
}

}  // namespace

TEST_CASE("normal_plus_nilpotent") {
  SUBCASE("2x2 Jordan-like block") {
    const auto w = normal_plus_nilpotent(jordan());
    ComplexMatrix N(2, 2), K(2, 2);
    N << 1, 2, 2, 1;
    K << 0, 0, -2, 0;
    CHECK(w.theta == 0.0);
    CHECK(w.basis.U == ComplexMatrix::Identity(2, 2));
    CHECK((w.normal - N).norm() <= 1e-15);
    CHECK((w.nilpotent - K).norm() <= 1e-15);
    CHECK(oracle::matmul(w.nilpotent, w.nilpotent).norm() == 0.0);
    CHECK(w.status == WitnessStatus::pass);
  }
  SUBCASE("Hermitian input has no nilpotent part") {
    const ComplexMatrix H = random_hermitian(5, 3);
    const auto w = normal_plus_nilpotent(H);
    CHECK(w.exact_route);
    CHECK(w.nilpotent.norm() <= 1e-12 * H.norm());
    CHECK((w.normal - H).norm() <= 1e-12 * H.norm());
  }
  SUBCASE("normal input with constant diagonal") {
    ComplexMatrix F(4, 4);
    for (Index j = 0; j < 4; ++j)
      for (Index k = 0; k < 4; ++k) F(j, k) = root_of_unity(static_cast<long>(j * k), 4) / 2.0;
    const ComplexMatrix X = F * random_gaussian(4, 1, 2).asDiagonal() * F.adjoint();
    const auto w = normal_plus_nilpotent(X);
    REQUIRE(w.basis.U == ComplexMatrix::Identity(4, 4));
    const cd e2 = std::polar(1.0, 2 * w.theta);
    for (Index j = 0; j < 4; ++j)
      for (Index k = j + 1; k < 4; ++k)
        CHECK(std::abs(w.nilpotent(k, j) - (X(k, j) - e2 * std::conj(X(j, k)))) <= 1e-13);
  }
  SUBCASE("random general") {
    for (Index n : {2, 4, 8}) {
      const ComplexMatrix X = random_gaussian(n, n, 40 + static_cast<std::uint64_t>(n));
      const auto w = normal_plus_nilpotent(X);
      const ComplexMatrix& N = w.normal;
      CHECK(oracle::fro(oracle::add(oracle::add(N, w.nilpotent), X, -1.0)) <= 1e-8 * (1 + X.norm()));
      const ComplexMatrix NN = oracle::add(oracle::matmul(N, oracle::adjoint(N)), oracle::matmul(oracle::adjoint(N), N), -1.0);
      CHECK(oracle::fro(NN) <= 1e-8 * (1 + N.squaredNorm()));
      CHECK(nilpotency_residual(w.nilpotent) <= 1e-6);
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k <= j; ++k) CHECK(w.nilpotent_in_basis(k, j) == cd(0.0));
    }
  }
  SUBCASE("zero trace gives theta = 0") {
    CHECK(normal_plus_nilpotent(random_trace_zero(3, 1)).theta == 0.0);
  }
}

TEST_CASE("verify_split") {
  SUBCASE("Jordan-like witness passes") {
    const auto cert = verify_split(jordan(), normal_plus_nilpotent(jordan()));
    CHECK(cert.status == CertificateStatus::pass);
  }
  SUBCASE("tampered nilpotent part fails on the sum") {
    auto w = normal_plus_nilpotent(jordan());
    w.nilpotent(1, 0) += 1e-3;
    const auto cert = verify_split(jordan(), w);
    CHECK(cert.status == CertificateStatus::fail);
    CHECK(!cert.residual("sum")->passed());
  }
  SUBCASE("zero matrix") {
    const ComplexMatrix Z = ComplexMatrix::Zero(3, 3);
    const auto cert = verify_split(Z, normal_plus_nilpotent(Z));
    CHECK(cert.status == CertificateStatus::pass);
    for (const auto& r : cert.residuals)
      if (r.name != "unitarity") CHECK(r.value == 0.0);
  }
}
