#include "dixmier/certify.hpp"

#include <cmath>
#include <sstream>

#include "dixmier/io.hpp"

namespace dixmier {

namespace {

double sqrt_dim(const ComplexMatrix& M) { return std::sqrt(static_cast<double>(M.rows())); }

// Read-only view of the stored data with contract checks on every lookup.
class Stored {
 public:
  explicit Stored(const DecompositionCertificate& cert) : cert_(cert) {}

  const ComplexMatrix& input(std::size_t k, Index rows = -1, Index cols = -1) const {
    if (k >= cert_.inputs.size()) fail("input #" + std::to_string(k));
    check_shape(cert_.inputs[k], "input #" + std::to_string(k), rows, cols);
    return cert_.inputs[k];
  }
  const ComplexMatrix& factor(const std::string& name, Index rows = -1, Index cols = -1) const {
    auto it = cert_.factors.find(name);
    if (it == cert_.factors.end()) fail("factor '" + name + "'");
    check_shape(it->second, "factor '" + name + "'", rows, cols);
    return it->second;
  }
  double scalar(const std::string& name) const {
    auto it = cert_.scalars.find(name);
    if (it == cert_.scalars.end()) fail("scalar '" + name + "'");
    return it->second;
  }
  std::string note(const std::string& name) const {
    auto it = cert_.notes.find(name);
    if (it == cert_.notes.end()) fail("note '" + name + "'");
    return it->second;
  }
  const Tolerances& tol() const { return cert_.tolerances; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ContractError("certificate '" + cert_.operation + "': missing " + what);
  }
  void check_shape(const ComplexMatrix& M, const std::string& what, Index rows, Index cols) const {
    if ((rows >= 0 && M.rows() != rows) || (cols >= 0 && M.cols() != cols)) {
      std::ostringstream os;
      os << "certificate '" << cert_.operation << "': " << what << " is " << M.rows() << "x" << M.cols()
         << ", expected " << rows << "x" << cols;
      throw ContractError(os.str());
    }
  }
  const DecompositionCertificate& cert_;
};

bool exact_route(const Stored& s) { return s.note("route") == "exact"; }

double pinch_threshold(const Stored& s, const ComplexMatrix& X) {
  return exact_route(s) ? 1e-10 * (1.0 + X.norm()) : s.scalar("residual_target");
}

ComplexMatrix matrix_power(const ComplexMatrix& M, Index k) {
  ComplexMatrix out = ComplexMatrix::Identity(M.rows(), M.cols());
  for (Index i = 0; i < k; ++i) out = out * M;
  return out;
}

std::vector<ResidualEntry> pinch_residuals(const Stored& s, std::size_t count) {
  const Index n = s.input(0).rows();
  const ComplexMatrix& U = s.factor("U", n, n);
  std::vector<ResidualEntry> out;
  for (std::size_t j = 0; j < count; ++j) {
    const ComplexMatrix& X = s.input(j, n, n);
    out.push_back({"pinch[" + std::to_string(j) + "]", diagonal_deviation(X, U), pinch_threshold(s, X)});
  }
  out.push_back({"unitarity", unitarity_defect(U), 1e-12 * sqrt_dim(U)});
  return out;
}

std::vector<ResidualEntry> commutator_residuals(const Stored& s) {
  const ComplexMatrix& A = s.input(0);
  const Index n = A.rows();
  const ComplexMatrix& B = s.factor("B", n, n);
  const ComplexMatrix& C = s.factor("C", n, n);
  const ComplexMatrix& U = s.factor("U", n, n);
  const double rel = exact_route(s) ? s.tol().commutator_tol : s.tol().general_commutator_tol;
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  return {
      {"commutator", (B * C - C * B - A).norm(), rel * (1.0 + A.norm())},
      {"C_order", (matrix_power(C, n) - I).norm(), 1e-10},
      {"pinch", diagonal_deviation(A, U), pinch_threshold(s, A)},
      {"unitarity", unitarity_defect(U), 1e-12 * sqrt_dim(U)},
  };
}

std::vector<ResidualEntry> self_commutator_residuals(const Stored& s) {
  const ComplexMatrix& A = s.input(0);
  const Index n = A.rows();
  const ComplexMatrix& X = s.factor("X", n, n);
  const ComplexMatrix& D = s.factor("D", n, n);
  const ComplexMatrix& C = s.factor("C", n, n);
  const ComplexMatrix& U = s.factor("U", n, n);
  const double lambda = s.scalar("lambda");
  ComplexMatrix shifted = D;
  shifted.diagonal().array() += lambda;
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  return {
      {"self_commutator", (X.adjoint() * X - X * X.adjoint() - A).norm(), s.tol().commutator_tol * (1.0 + A.norm())},
      {"intermediate", (D - C * D * C.adjoint() - A).norm(), 1e-10 * (1.0 + A.norm())},
      {"square_root", (X.adjoint() * X - shifted).norm(), 1e-10 * (1.0 + shifted.norm())},
      {"C_order", (matrix_power(C, n) - I).norm(), 1e-10},
      {"pinch", diagonal_deviation(A, U), 1e-10 * (1.0 + A.norm())},
      {"unitarity", unitarity_defect(U), 1e-12 * sqrt_dim(U)},
  };
}

std::vector<ResidualEntry> two_projection_residuals(const Stored& s) {
  const ComplexMatrix& A = s.input(0);
  const Index n = A.rows();
  const ComplexMatrix& U = s.input(1, n, n);
  const ComplexMatrix& P = s.factor("P", n, n);
  const ComplexMatrix& Q = s.factor("Q", n, n);
  const double a = s.scalar("a");
  const double b = s.scalar("b");
  return {
      {"reconstruction", (a * P + b * Q - A).norm(), 1e-8 * (1.0 + A.norm())},
      {"P_projection", projection_defect(P), s.tol().proj_tol},
      {"Q_projection", projection_defect(Q), s.tol().proj_tol},
      {"symmetry", (A + U.adjoint() * A * U).norm(), 1e-9 * (1.0 + A.norm())},
      {"U_unitarity", unitarity_defect(U), 1e-10 * sqrt_dim(U)},
  };
}

std::vector<ResidualEntry> four_projection_residuals(const Stored& s) {
  const ComplexMatrix& A = s.input(0);
  const Index n = A.rows();
  const Index m = n / 2;
  std::vector<ResidualEntry> out;
  ComplexMatrix rebuilt = ComplexMatrix::Zero(n, n);
  std::vector<ResidualEntry> proj;
  for (int k = 0; k < 4; ++k) {
    const std::string name = "P" + std::to_string(k);
    const ComplexMatrix& P = s.factor(name, n, n);
    rebuilt += s.scalar("c" + std::to_string(k)) * P;
    proj.push_back({name + "_projection", projection_defect(P), 1e-8});
  }
  out.push_back({"reconstruction", (rebuilt - A).norm(), 1e-7 * (1.0 + A.norm())});
  out.insert(out.end(), proj.begin(), proj.end());

  const ComplexMatrix& S1 = s.factor("S1", m, m);
  const ComplexMatrix& S2 = s.factor("S2", m, m);
  const ComplexMatrix& Y = s.factor("Y", m, m);
  const double a = s.scalar("a");
  const double b = s.scalar("b");
  const double shift = s.scalar("shift");
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  const ComplexMatrix oneS1 = I - S1 * S1;
  const ComplexMatrix oneS2 = I - S2 * S2;
  const double tiny = std::numeric_limits<double>::min();
  ComplexMatrix diag_check = (a * (I + S1) + b * (I + S2)) / 2.0 - Y;
  diag_check.diagonal().array() -= shift;
  out.push_back({"offdiagonal_identity",
                 (a * a * oneS1 - b * b * oneS2).norm() / std::max(a * a * oneS1.norm(), tiny), 1e-9});
  out.push_back({"diagonal_identity", diag_check.norm() / std::max(Y.norm(), tiny), 1e-9});
  out.push_back({"S1_contraction", std::max(0.0, op_norm(S1) - 1.0), 1e-10});
  out.push_back({"S2_contraction", std::max(0.0, op_norm(S2) - 1.0), 1e-10});
  return out;
}

std::vector<ResidualEntry> schur_split_residuals(const Stored& s) {
  const ComplexMatrix& X = s.input(0);
  const Index n = X.rows();
  SchurSplitWitness w;
  w.normal = s.factor("N", n, n);
  w.nilpotent = s.factor("K", n, n);
  w.basis.U = s.factor("U", n, n);
  w.theta = s.scalar("theta");
  return verify_split(X, w, s.tol()).residuals;
}

DecompositionCertificate start(const std::string& operation, std::vector<ComplexMatrix> inputs,
                               const Tolerances& tol) {
  DecompositionCertificate cert;
  cert.operation = operation;
  cert.tool_version = kToolVersion;
  cert.tolerances = tol;
  cert.inputs = std::move(inputs);
  cert.input_digest = input_digest(cert.inputs);
  return cert;
}

void finish(DecompositionCertificate& cert, bool feasibility_certified) {
  cert.residuals = recompute_residuals(cert);
  if (cert.all_residuals_pass())
    cert.status = CertificateStatus::pass;
  else
    cert.status = feasibility_certified ? CertificateStatus::fail : CertificateStatus::feasibility_not_certified;
}

void record_solver(DecompositionCertificate& cert, const SolverConfig& solver) {
  cert.scalars["residual_target"] = solver.residual_target;
  cert.notes["multistart"] = std::to_string(solver.multistart);
  cert.notes["seed"] = std::to_string(solver.seed);
}

}  // namespace

DecompositionCertificate certify_pinch(const std::vector<ComplexMatrix>& inputs, const PinchResult& result,
                                       const SolverConfig& solver, const Tolerances& tol) {
  auto cert = start("pinch", inputs, tol);
  cert.factors["U"] = result.witness.U;
  record_solver(cert, solver);
  cert.notes["route"] = result.exact_path ? "exact" : "numerical";
  cert.notes["starts_used"] = std::to_string(result.starts_used);
  cert.notes["iterations"] = std::to_string(result.iterations);
  finish(cert, result.certified());
  return cert;
}

DecompositionCertificate certify_commutator(const ComplexMatrix& A, const CommutatorWitness& w,
                                            const SolverConfig& solver, const Tolerances& tol) {
  auto cert = start("commutator", {A}, tol);
  cert.factors = {{"B", w.B}, {"C", w.C}, {"U", w.basis.U}};
  record_solver(cert, solver);
  cert.notes["route"] = w.exact_route ? "exact" : "numerical";
  cert.conditioning["entry_bound"] = w.entry_bound;
  finish(cert, w.status != WitnessStatus::feasibility_not_certified);
  return cert;
}

DecompositionCertificate certify_self_commutator(const ComplexMatrix& A, const SelfCommutatorWitness& w,
                                                 const Tolerances& tol) {
  auto cert = start("self-commutator", {A}, tol);
  cert.factors = {{"X", w.X}, {"D", w.D}, {"C", w.C}, {"U", w.basis.U}};
  cert.scalars["lambda"] = w.lambda;
  cert.notes["route"] = "exact";
  finish(cert, true);
  return cert;
}

DecompositionCertificate certify_two_projection(const ComplexMatrix& A, const ComplexMatrix& U,
                                                const TwoProjectionCombination& w, const Tolerances& tol) {
  auto cert = start("two-proj", {A, U}, tol);
  cert.factors = {{"P", w.P}, {"Q", w.Q}};
  cert.scalars = {{"a", w.a}, {"b", w.b}};
  cert.notes["degenerate"] = w.degenerate ? "true" : "false";
  finish(cert, true);
  return cert;
}

DecompositionCertificate certify_four_projection(const ComplexMatrix& A, const FourProjectionWitness& w,
                                                 const Tolerances& tol) {
  auto cert = start("four-proj", {A}, tol);
  for (int k = 0; k < 4; ++k) {
    cert.factors["P" + std::to_string(k)] = w.projections[static_cast<std::size_t>(k)];
    cert.scalars["c" + std::to_string(k)] = w.coefficients[static_cast<std::size_t>(k)];
  }
  cert.factors["S1"] = w.S1;
  cert.factors["S2"] = w.S2;
  cert.factors["Y"] = w.Y;
  cert.scalars["a"] = w.a;
  cert.scalars["b"] = w.b;
  cert.scalars["d"] = w.d;
  cert.scalars["lambda"] = w.lambda;
  cert.scalars["shift"] = w.shift;
  cert.scalars["scale"] = w.scale;
  cert.notes["variant"] = w.trace_zero_variant ? "trace-zero" : "general";
  cert.conditioning["s1_min"] = w.s1_min;
  cert.conditioning["s1_max"] = w.s1_max;
  cert.conditioning["s2_min"] = w.s2_min;
  cert.conditioning["s2_max"] = w.s2_max;
  finish(cert, true);
  return cert;
}

DecompositionCertificate certify_schur_split(const ComplexMatrix& X, const SchurSplitWitness& w,
                                             const SolverConfig& solver, const Tolerances& tol) {
  auto cert = start("schur-split", {X}, tol);
  cert.factors = {{"N", w.normal}, {"K", w.nilpotent}, {"U", w.basis.U}};
  cert.scalars["theta"] = w.theta;
  record_solver(cert, solver);
  cert.notes["route"] = w.exact_route ? "exact" : "numerical";
  finish(cert, w.status != WitnessStatus::feasibility_not_certified);
  return cert;
}

std::vector<ResidualEntry> recompute_residuals(const DecompositionCertificate& cert) {
  const Stored s(cert);
  if (cert.inputs.empty()) throw ContractError("certificate '" + cert.operation + "': no inputs");
  for (const auto& X : cert.inputs) require_square(X, "certificate input");
  if (cert.operation == "pinch") return pinch_residuals(s, cert.inputs.size());
  if (cert.operation == "commutator") return commutator_residuals(s);
  if (cert.operation == "self-commutator") return self_commutator_residuals(s);
  if (cert.operation == "two-proj") return two_projection_residuals(s);
  if (cert.operation == "four-proj") return four_projection_residuals(s);
  if (cert.operation == "schur-split") return schur_split_residuals(s);
  throw ContractError("unknown certificate operation '" + cert.operation + "'");
}

VerifyReport verify_certificate(const DecompositionCertificate& cert) {
  VerifyReport report;
  report.digest_matches = input_digest(cert.inputs) == cert.input_digest;
  if (!report.digest_matches) report.problems.push_back("input digest does not match the stored inputs");

  report.recomputed = recompute_residuals(cert);
  report.residuals_pass = true;
  report.residuals_agree = report.recomputed.size() == cert.residuals.size();
  if (!report.residuals_agree) report.problems.push_back("stored residual list does not match the operation");
  for (const auto& r : report.recomputed) {
    if (!r.passed()) {
      report.residuals_pass = false;
      std::ostringstream os;
      os << "residual '" << r.name << "' = " << r.value << " exceeds " << r.threshold;
      report.problems.push_back(os.str());
    }
    const ResidualEntry* stored = cert.residual(r.name);
    if (!stored) {
      report.residuals_agree = false;
      report.problems.push_back("residual '" + r.name + "' is missing");
      continue;
    }
    if (!(std::abs(stored->value - r.value) <= kResidualAgreement) ||
        !(std::abs(stored->threshold - r.threshold) <= kResidualAgreement)) {
      report.residuals_agree = false;
      std::ostringstream os;
      os << "residual '" << r.name << "': stored " << stored->value << " (threshold " << stored->threshold
         << "), recomputed " << r.value << " (threshold " << r.threshold << ")";
      report.problems.push_back(os.str());
    }
  }
  report.status_pass = cert.status == CertificateStatus::pass;
  if (!report.status_pass) report.problems.push_back(std::string("status is ") + to_string(cert.status));
  return report;
}

}  // namespace dixmier
