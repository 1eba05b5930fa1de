#include "dixmier/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

#include "dixmier/certify.hpp"
#include "dixmier/io.hpp"

namespace dixmier {

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string output;
  std::optional<double> tol;
  int multistart = SolverConfig{}.multistart;
  std::uint64_t seed = 0;
  std::string kind;
  long n = 0;
};

Tolerances tolerances_for(const Options& o) {
  Tolerances tol = default_tolerances();
  if (o.tol) {
    tol.hermitian_tol = tol.rank_tol = tol.proj_tol = tol.sqrt_tol = tol.psd_tol = tol.trace_tol = *o.tol;
  }
  return tol;
}

SolverConfig solver_for(const Options& o) {
  SolverConfig cfg;
  cfg.multistart = o.multistart;
  cfg.seed = o.seed;
  return cfg;
}

ComplexMatrix load(const std::string& path) { return read_matrix_file(path).matrix; }

void emit_certificate(const DecompositionCertificate& cert, const Options& o, std::ostream& out) {
  if (o.output.empty())
    out << format_certificate(cert);
  else
    write_certificate(o.output, cert);
}

int certificate_exit(const DecompositionCertificate& cert, std::ostream& err) {
  if (cert.status == CertificateStatus::pass) return kExitPass;
  err << "status: " << to_string(cert.status) << "\n";
  for (const auto& r : cert.residuals)
    if (!r.passed()) err << "  " << r.name << " = " << r.value << " > " << r.threshold << "\n";
  return kExitFail;
}

int run_decomposition(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const Tolerances tol = tolerances_for(o);
  const SolverConfig solver = solver_for(o);
  DecompositionCertificate cert;
  if (command == "pinch") {
    std::vector<ComplexMatrix> ops;
    for (const auto& path : o.inputs) ops.push_back(load(path));
    const auto result = simultaneous_pinch(PinchProblem{ops, solver}, tol);
    cert = certify_pinch(ops, result, solver, tol);
  } else if (command == "commutator") {
    const ComplexMatrix A = load(o.inputs.at(0));
    cert = certify_commutator(A, commutator_factorize(A, solver, tol), solver, tol);
  } else if (command == "self-commutator") {
    const ComplexMatrix A = load(o.inputs.at(0));
    cert = certify_self_commutator(A, self_commutator_factorize(A, tol), tol);
  } else if (command == "two-proj") {
    const ComplexMatrix A = load(o.inputs.at(0));
    const ComplexMatrix U = load(o.inputs.at(1));
    cert = certify_two_projection(A, U, two_projection_combination(A, U, tol), tol);
  } else if (command == "four-proj") {
    const ComplexMatrix A = load(o.inputs.at(0));
    cert = certify_four_projection(A, four_projection_combination(A, tol), tol);
  } else if (command == "schur-split") {
    const ComplexMatrix X = load(o.inputs.at(0));
    cert = certify_schur_split(X, normal_plus_nilpotent(X, solver, tol), solver, tol);
  }
  emit_certificate(cert, o, out);
  return certificate_exit(cert, err);
}

int run_verify(const Options& o, std::ostream& out) {
  const auto cert = read_certificate(o.inputs.at(0));
  const auto report = verify_certificate(cert);
  out << cert.operation << ": " << (report.passed() ? "pass" : "fail") << "\n";
  for (const auto& r : report.recomputed)
    out << "  " << r.name << " = " << r.value << " (threshold " << r.threshold << ")"
        << (r.passed() ? "" : "  FAIL") << "\n";
  for (const auto& p : report.problems) out << "  problem: " << p << "\n";
  return report.passed() ? kExitPass : kExitFail;
}

int run_gen(const Options& o, std::ostream& out) {
  if (o.n < 1) throw ContractError("gen: --n must be positive");
  const Index n = o.n;
  ComplexMatrix M;
  bool hermitian = false;
  if (o.kind == "hermitian") {
    M = random_hermitian(n, o.seed);
    hermitian = true;
  } else if (o.kind == "general") {
    M = random_gaussian(n, n, o.seed);
  } else if (o.kind == "trace-zero") {
    M = random_trace_zero(n, o.seed);
  } else {
    M = random_hermitian_trace_zero(n, o.seed);
    hermitian = true;
  }
  const nlohmann::json metadata = {{"name", o.kind}, {"hermitian", hermitian}, {"seed", o.seed}};
  if (o.output.empty())
    out << format_matrix_file(M, metadata);
  else
    write_matrix_file(o.output, M, metadata);
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constructive pinching, commutator, projection and normal+nilpotent decompositions", "dixmier"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool solver) {
    sub->add_option("-o,--output", o.output, "Write the result here instead of stdout");
    sub->add_option("--tol", o.tol, "Override the structural tolerances")->check(CLI::PositiveNumber);
    if (solver) {
      sub->add_option("--multistart", o.multistart, "Random starts of the numerical solver")
          ->check(CLI::PositiveNumber);
      sub->add_option("--seed", o.seed, "Seed of the numerical solver");
    }
  };

  auto* pinch = app.add_subcommand("pinch", "Common constant-diagonal basis for one or more matrices");
  pinch->add_option("inputs", o.inputs, "Matrix files")->required()->check(CLI::ExistingFile);
  add_common(pinch, true);

  for (const char* name : {"commutator", "self-commutator", "four-proj", "schur-split"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("input", o.inputs, "Matrix file")->required()->expected(1)->check(CLI::ExistingFile);
    add_common(sub, std::string(name) == "commutator" || std::string(name) == "schur-split");
  }
  app.get_subcommand("commutator")->description("A = BC - CB for trace-zero A");
  app.get_subcommand("self-commutator")->description("A = X*X - XX* for Hermitian trace-zero A");
  app.get_subcommand("four-proj")->description("Hermitian A as a combination of four projections");
  app.get_subcommand("schur-split")->description("X = N + K with N normal and K nilpotent");

  auto* two = app.add_subcommand("two-proj", "A = aP + bQ for Hermitian A with A + U*AU = 0");
  two->add_option("inputs", o.inputs, "Matrix files A and U")->required()->expected(2)->check(CLI::ExistingFile);
  add_common(two, false);

  auto* verify = app.add_subcommand("verify", "Recompute every residual of a certificate");
  verify->add_option("certificate", o.inputs, "Certificate file")->required()->expected(1)->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen", "Deterministic random test matrix");
  gen->add_option("--kind", o.kind, "Matrix family")
      ->required()
      ->check(CLI::IsMember({"hermitian", "general", "trace-zero", "hermitian-trace-zero"}));
  gen->add_option("--n", o.n, "Dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Seed");
  gen->add_option("-o,--output", o.output, "Write the matrix here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "verify") return run_verify(o, out);
    if (command == "gen") return run_gen(o, out);
    return run_decomposition(command, o, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitFail;
  } catch (const InternalConsistencyError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    // Remaining library errors reject the input itself.
    err << "contract error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace dixmier
