#include "dixmier/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dixmier {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& M, const json& metadata) {
  json data = json::array();
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) data.push_back({M(i, j).real(), M(i, j).imag()});
  json out = {{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
  if (!metadata.is_null() && !metadata.empty()) out["metadata"] = metadata;
  return out;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) throw ParseError(context + ": expected an object");
  for (const char* key : {"rows", "cols", "data"})
    if (!j.contains(key)) throw ParseError(context + ": missing field '" + key + "'");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw ParseError(context + ": fields 'rows' and 'cols' must be integers");
  const auto rows = j["rows"].get<long long>();
  const auto cols = j["cols"].get<long long>();
  if (rows <= 0 || cols <= 0) throw ParseError(context + ": 'rows' and 'cols' must be positive");
  const json& data = j["data"];
  if (!data.is_array()) throw ParseError(context + ": field 'data' must be an array");
  if (static_cast<long long>(data.size()) != rows * cols) {
    std::ostringstream os;
    os << context << ": field 'data' has " << data.size() << " entries, expected " << rows * cols;
    throw ParseError(os.str());
  }
  ComplexMatrix M(rows, cols);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const json& e = data[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ParseError(context + ": field 'data[" + std::to_string(k) + "]' must be a [re, im] pair");
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ParseError(context + ": field 'data[" + std::to_string(k) + "]' is not finite");
    M(static_cast<Index>(k) / cols, static_cast<Index>(k) % cols) = cd(re, im);
  }
  return M;
}

MatrixFile parse_matrix_file(const std::string& text, const std::string& context) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
  MatrixFile f;
  f.matrix = matrix_from_json(j, context);
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw ParseError(context + ": field 'metadata' must be an object");
    f.metadata = j["metadata"];
  }
  return f;
}

namespace {

// Like json::dump(1), but arrays of plain values stay on one line.
void pretty(std::ostream& os, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) + 1, ' ');
  const std::string close(static_cast<std::size_t>(depth), ' ');
  if (j.is_array() && !j.empty() &&
      std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); })) {
    os << j.dump();
  } else if (j.is_array() && !j.empty()) {
    os << "[\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << pad;
      pretty(os, *it, depth + 1);
      os << (std::next(it) == j.end() ? "\n" : ",\n");
    }
    os << close << "]";
  } else if (j.is_object() && !j.empty()) {
    os << "{\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << pad << json(it.key()).dump() << ": ";
      pretty(os, it.value(), depth + 1);
      os << (std::next(it) == j.end() ? "\n" : ",\n");
    }
    os << close << "}";
  } else {
    os << j.dump();
  }
}

std::string pretty(const json& j) {
  std::ostringstream os;
  pretty(os, j, 0);
  os << "\n";
  return os.str();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

MatrixFile read_matrix_file(const std::filesystem::path& path) {
  return parse_matrix_file(slurp(path), path.string());
}

std::string format_matrix_file(const ComplexMatrix& M, const json& metadata) {
  return pretty(matrix_to_json(M, metadata));
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& M, const json& metadata) {
  spit(path, format_matrix_file(M, metadata));
}

std::string input_digest(const std::vector<ComplexMatrix>& inputs) {
  json canonical = json::array();
  for (const auto& M : inputs) canonical.push_back(matrix_to_json(M));
  const std::string bytes = canonical.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("input_digest: SHA-256 failed");
  std::ostringstream os;
  os << "sha256:" << std::hex << std::setfill('0');
  for (unsigned int k = 0; k < len; ++k) os << std::setw(2) << static_cast<int>(md[k]);
  return os.str();
}

json tolerances_to_json(const Tolerances& t) {
  return {{"hermitian_tol", t.hermitian_tol},   {"rank_tol", t.rank_tol},
          {"proj_tol", t.proj_tol},             {"sqrt_tol", t.sqrt_tol},
          {"psd_tol", t.psd_tol},               {"trace_tol", t.trace_tol},
          {"pairing_tol", t.pairing_tol},       {"commutator_tol", t.commutator_tol},
          {"general_commutator_tol", t.general_commutator_tol},
          {"jacobi_tol", t.jacobi_tol},         {"jacobi_max_sweeps", t.jacobi_max_sweeps}};
}

Tolerances tolerances_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("certificate: field 'tolerances' must be an object");
  Tolerances t;
  auto read = [&](const char* key, double& field) {
    if (j.contains(key)) {
      if (!j[key].is_number()) throw ParseError(std::string("certificate: tolerance '") + key + "' must be a number");
      field = j[key].get<double>();
    }
  };
  read("hermitian_tol", t.hermitian_tol);
  read("rank_tol", t.rank_tol);
  read("proj_tol", t.proj_tol);
  read("sqrt_tol", t.sqrt_tol);
  read("psd_tol", t.psd_tol);
  read("trace_tol", t.trace_tol);
  read("pairing_tol", t.pairing_tol);
  read("commutator_tol", t.commutator_tol);
  read("general_commutator_tol", t.general_commutator_tol);
  read("jacobi_tol", t.jacobi_tol);
  if (j.contains("jacobi_max_sweeps")) t.jacobi_max_sweeps = j["jacobi_max_sweeps"].get<int>();
  return t;
}

namespace {

json stored_matrix(const ComplexMatrix& M, const std::filesystem::path& side_stem, const std::string& name) {
  if (side_stem.empty() || std::max(M.rows(), M.cols()) < kInlineLimit) return matrix_to_json(M);
  std::filesystem::path side = side_stem;
  side += "." + name + ".json";
  write_matrix_file(side, M);
  return {{"file", side.filename().string()}};
}

ComplexMatrix loaded_matrix(const json& j, const std::filesystem::path& base_dir, const std::string& context) {
  if (j.is_object() && j.contains("file")) {
    if (!j["file"].is_string()) throw ParseError(context + ": field 'file' must be a string");
    return read_matrix_file(base_dir / j["file"].get<std::string>()).matrix;
  }
  return matrix_from_json(j, context);
}

}  // namespace

json certificate_to_json(const DecompositionCertificate& cert, const std::filesystem::path& side_stem) {
  json inputs = json::array();
  for (std::size_t k = 0; k < cert.inputs.size(); ++k)
    inputs.push_back(stored_matrix(cert.inputs[k], side_stem, "input" + std::to_string(k)));
  json factors = json::object();
  for (const auto& [name, M] : cert.factors) factors[name] = stored_matrix(M, side_stem, name);
  json residuals = json::array();
  for (const auto& r : cert.residuals)
    residuals.push_back({{"name", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"passed", r.passed()}});
  return {{"operation", cert.operation},
          {"tool_version", cert.tool_version},
          {"input_digest", cert.input_digest},
          {"tolerances", tolerances_to_json(cert.tolerances)},
          {"inputs", std::move(inputs)},
          {"factors", std::move(factors)},
          {"scalars", cert.scalars},
          {"residuals", std::move(residuals)},
          {"conditioning", cert.conditioning},
          {"notes", cert.notes},
          {"status", to_string(cert.status)}};
}

DecompositionCertificate certificate_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("certificate: expected an object");
  for (const char* key : {"operation", "input_digest", "tolerances", "inputs", "factors", "residuals", "status"})
    if (!j.contains(key)) throw ParseError(std::string("certificate: missing field '") + key + "'");
  DecompositionCertificate cert;
  try {
    cert.operation = j["operation"].get<std::string>();
    cert.tool_version = j.value("tool_version", std::string());
    cert.input_digest = j["input_digest"].get<std::string>();
    cert.tolerances = tolerances_from_json(j["tolerances"]);
    if (!j["inputs"].is_array()) throw ParseError("certificate: field 'inputs' must be an array");
    for (std::size_t k = 0; k < j["inputs"].size(); ++k)
      cert.inputs.push_back(loaded_matrix(j["inputs"][k], base_dir, "certificate.inputs[" + std::to_string(k) + "]"));
    if (!j["factors"].is_object()) throw ParseError("certificate: field 'factors' must be an object");
    for (const auto& [name, m] : j["factors"].items())
      cert.factors[name] = loaded_matrix(m, base_dir, "certificate.factors." + name);
    if (j.contains("scalars")) cert.scalars = j["scalars"].get<std::map<std::string, double>>();
    if (j.contains("conditioning")) cert.conditioning = j["conditioning"].get<std::map<std::string, double>>();
    if (j.contains("notes")) cert.notes = j["notes"].get<std::map<std::string, std::string>>();
    for (const auto& r : j["residuals"])
      cert.residuals.push_back({r.at("name").get<std::string>(), r.at("value").get<double>(),
                                r.at("threshold").get<double>()});
    cert.status = certificate_status_from_string(j["status"].get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  return cert;
}

std::string format_certificate(const DecompositionCertificate& cert, const std::filesystem::path& side_stem) {
  return pretty(certificate_to_json(cert, side_stem));
}

void write_certificate(const std::filesystem::path& path, const DecompositionCertificate& cert) {
  std::filesystem::path stem = path;
  stem.replace_extension();
  spit(path, format_certificate(cert, stem));
}

DecompositionCertificate read_certificate(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return certificate_from_json(j, path.parent_path());
}

}  // namespace dixmier
