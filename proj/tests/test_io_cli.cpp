#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dixmier/certify.hpp"
#include "dixmier/cli.hpp"
#include "dixmier/io.hpp"
#include "oracles.hpp"

using namespace dixmier;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dixmier_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("matrix files") {
  SUBCASE("round trip is bitwise") {
    ComplexMatrix M = random_gaussian(3, 4, 5);
    M(0, 0) = cd(1.0 / 3.0, -1e-300);
    M(1, 1) = cd(0.1 + 0.2, 5e-324);
    const auto back = parse_matrix_file(format_matrix_file(M, {{"name", "M"}}));
    CHECK(back.matrix == M);
    CHECK(back.metadata["name"] == "M");
  }
  SUBCASE("parse errors name the field") {
    auto message = [](const std::string& text) {
      try {
        parse_matrix_file(text);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string("no error");
    };
    CHECK(message(R"({"rows": 1, "cols": 1})").find("'data'") != std::string::npos);
    CHECK(message(R"({"rows": 1, "cols": 2, "data": [[1, 0]]})").find("'data' has 1 entries") != std::string::npos);
    CHECK(message(R"({"rows": 1, "cols": 1, "data": [[1]]})").find("data[0]") != std::string::npos);
    CHECK(message(R"({"rows": "1", "cols": 1, "data": [[1, 0]]})").find("'rows'") != std::string::npos);
    CHECK(message("{\"rows\": 1,\n \"cols\": }").find("line 2") != std::string::npos);
    CHECK(message(R"({"rows": 1, "cols": 1, "data": [[1, 0]], "metadata": 3})").find("'metadata'") !=
          std::string::npos);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_matrix_file("/nonexistent/m.json"), ParseError); }
}

TEST_CASE("input digest") {
  const ComplexMatrix A = random_gaussian(2, 2, 1);
  const std::string d = input_digest({A});
  CHECK(d.rfind("sha256:", 0) == 0);
  CHECK(d.size() == 7 + 64);
  CHECK(d == input_digest({A}));
  ComplexMatrix B = A;
  B(1, 1) = cd(std::nextafter(B(1, 1).real(), 10.0), B(1, 1).imag());
  CHECK(d != input_digest({B}));
}

TEST_CASE("certificates") {
  const ComplexMatrix A = random_hermitian_trace_zero(4, 3);
  const auto cert = certify_commutator(A, commutator_factorize(A), {});
  CHECK(cert.status == CertificateStatus::pass);
  CHECK(verify_certificate(cert).passed());

  SUBCASE("JSON round trip preserves everything verify needs") {
    const auto back = certificate_from_json(nlohmann::json::parse(format_certificate(cert)));
    CHECK(back.factors.at("B") == cert.factors.at("B"));
    CHECK(back.inputs.at(0) == A);
    CHECK(back.conditioning.at("entry_bound") == cert.conditioning.at("entry_bound"));
    CHECK(verify_certificate(back).passed());
    CHECK(format_certificate(back) == format_certificate(cert));
  }
  SUBCASE("tampering is detected") {
    auto bad = cert;
    bad.residuals[0].value += 1e-9;
    CHECK(!verify_certificate(bad).residuals_agree);
    bad = cert;
    bad.factors["B"](0, 1) += 1e-6;
    CHECK(!verify_certificate(bad).passed());
    bad = cert;
    bad.inputs[0](0, 0) += 1e-9;
    CHECK(!verify_certificate(bad).digest_matches);
    bad = cert;
    bad.status = CertificateStatus::fail;
    CHECK(!verify_certificate(bad).passed());
    bad = cert;
    bad.factors.erase("C");
    CHECK_THROWS_AS(verify_certificate(bad), ContractError);
  }
  SUBCASE("large factors go to side files") {
    TempDir dir;
    const ComplexMatrix H = random_hermitian(64, 1);
    const auto result = simultaneous_pinch({{H}, {}});
    const auto big = certify_pinch({H}, result, {});
    write_certificate(dir / "big.json", big);
    CHECK(fs::exists(dir / "big.U.json"));
    CHECK(fs::exists(dir / "big.input0.json"));
    CHECK(read_text(dir / "big.json").find("\"file\": \"big.U.json\"") != std::string::npos);
    const auto back = read_certificate(dir / "big.json");
    CHECK(back.factors.at("U") == big.factors.at("U"));
    CHECK(verify_certificate(back).passed());
  }
  SUBCASE("malformed certificates") {
    CHECK_THROWS_AS(certificate_from_json(nlohmann::json::parse(R"({"operation": "pinch"})")), ParseError);
    auto j = nlohmann::json::parse(format_certificate(cert));
    j["status"] = "maybe";
    CHECK_THROWS_AS(certificate_from_json(j), ParseError);
    j = nlohmann::json::parse(format_certificate(cert));
    j["operation"] = "unknown";
    CHECK_THROWS_AS(verify_certificate(certificate_from_json(j)), ContractError);
  }
}

TEST_CASE("every operation certifies and verifies") {
  const ComplexMatrix H = random_hermitian(4, 1);
  const ComplexMatrix Z = random_hermitian_trace_zero(4, 2);
  const ComplexMatrix G = random_gaussian(4, 4, 3);
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap.topRightCorner(2, 2).setIdentity();
  swap.bottomLeftCorner(2, 2).setIdentity();
  ComplexMatrix T = ComplexMatrix::Zero(4, 4);
  T.topLeftCorner(2, 2) = H.topLeftCorner(2, 2);
  T.bottomRightCorner(2, 2) = -H.topLeftCorner(2, 2);

  std::vector<DecompositionCertificate> certs = {
      certify_pinch({H, G}, simultaneous_pinch({{H, G}, {}}), {}),
      certify_self_commutator(Z, self_commutator_factorize(Z)),
      certify_two_projection(T, swap, two_projection_combination(T, swap)),
      certify_four_projection(H, four_projection_combination(H)),
      certify_schur_split(G, normal_plus_nilpotent(G), {}),
  };
  for (const auto& c : certs) {
    CAPTURE(c.operation);
    CHECK(c.status == CertificateStatus::pass);
    CHECK(c.tool_version == kToolVersion);
    const auto report = verify_certificate(certificate_from_json(nlohmann::json::parse(format_certificate(c))));
    CHECK(report.passed());
  }
}

TEST_CASE("command line") {
  TempDir dir;
  SUBCASE("gen, commutator, verify") {
    REQUIRE(cli({"gen", "--kind", "trace-zero", "--n", "2", "--seed", "0", "-o", dir / "a.json"}).code == 0);
    CHECK(cli({"commutator", dir / "a.json", "-o", dir / "c.json"}).code == 0);
    CHECK(cli({"verify", dir / "c.json"}).code == 0);
  }
  SUBCASE("hand-edited residual") {
    REQUIRE(cli({"gen", "--kind", "hermitian-trace-zero", "--n", "4", "--seed", "1", "-o", dir / "a.json"}).code == 0);
    REQUIRE(cli({"self-commutator", dir / "a.json", "-o", dir / "c.json"}).code == 0);
    auto j = nlohmann::json::parse(read_text(dir / "c.json"));
    j["residuals"][0]["value"] = j["residuals"][0]["value"].get<double>() + 1e-6;
    write_text(dir / "c.json", j.dump());
    CHECK(cli({"verify", dir / "c.json"}).code == 1);
  }
  SUBCASE("pinch on one Hermitian input") {
    REQUIRE(cli({"gen", "--kind", "hermitian", "--n", "6", "--seed", "4", "-o", dir / "h.json"}).code == 0);
    const Run r = cli({"pinch", dir / "h.json"});
    CHECK(r.code == 0);
    const auto cert = certificate_from_json(nlohmann::json::parse(r.out));
    const ComplexMatrix H = read_matrix_file(dir / "h.json").matrix;
    CHECK(cert.status == CertificateStatus::pass);
    CHECK(cert.notes.at("route") == "exact");
    CHECK(cert.residual("pinch[0]")->value <= 1e-10 * (1 + H.norm()));
  }
  SUBCASE("determinism") {
    REQUIRE(cli({"gen", "--kind", "general", "--n", "4", "--seed", "9", "-o", dir / "x.json"}).code == 0);
    const Run a = cli({"schur-split", dir / "x.json", "--seed", "3"});
    const Run b = cli({"schur-split", dir / "x.json", "--seed", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(cli({"gen", "--kind", "general", "--n", "4", "--seed", "9"}).out == read_text(dir / "x.json"));
  }
  SUBCASE("usage, parse and contract errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"gen", "--kind", "weird", "--n", "2"}).code == 2);
    CHECK(cli({"verify", dir / "missing.json"}).code == 2);
    write_text(dir / "bad.json", "{\"rows\": 2, \"cols\": 2, \"data\": [[1, 0]]}");
    const Run r = cli({"commutator", dir / "bad.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("'data'") != std::string::npos);
    REQUIRE(cli({"gen", "--kind", "hermitian", "--n", "3", "--seed", "1", "-o", dir / "h3.json"}).code == 0);
    CHECK(cli({"commutator", dir / "h3.json"}).code == 2);
    CHECK(cli({"four-proj", dir / "h3.json"}).code == 2);
    REQUIRE(cli({"gen", "--kind", "hermitian", "--n", "2", "--seed", "1", "-o", dir / "h2.json"}).code == 0);
    CHECK(cli({"pinch", dir / "h2.json", dir / "h3.json"}).code == 2);
  }
  SUBCASE("help") { CHECK(cli({"--help"}).code == 0); }
  SUBCASE("solver budget too small") {
    REQUIRE(cli({"gen", "--kind", "trace-zero", "--n", "6", "--seed", "2", "-o", dir / "t.json"}).code == 0);
    // One start with the default budget still succeeds; the exit code follows the status.
    const Run r = cli({"commutator", dir / "t.json", "--multistart", "1"});
    const auto cert = certificate_from_json(nlohmann::json::parse(r.out));
    CHECK(r.code == (cert.status == CertificateStatus::pass ? 0 : 1));
  }
}
