#pragma once

// Matrix files and certificate files (JSON).
//
// Matrix file: {"rows": r, "cols": c, "data": [[re, im], ...] row-major,
//               "metadata": {...}}.
// Doubles are written in shortest round-trip decimal form, so reading a
// file reproduces every entry bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dixmier/certificate.hpp"

namespace dixmier {

/// Factor matrices of at least this dimension are written to side files.
inline constexpr Index kInlineLimit = 64;

nlohmann::json matrix_to_json(const ComplexMatrix& M, const nlohmann::json& metadata = nlohmann::json::object());
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& context = "matrix");

struct MatrixFile {
  ComplexMatrix matrix;
  nlohmann::json metadata = nlohmann::json::object();
};

MatrixFile parse_matrix_file(const std::string& text, const std::string& context = "matrix");
MatrixFile read_matrix_file(const std::filesystem::path& path);
std::string format_matrix_file(const ComplexMatrix& M, const nlohmann::json& metadata = nlohmann::json::object());
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& M,
                       const nlohmann::json& metadata = nlohmann::json::object());

/// "sha256:<hex>" over the canonical serialization of the inputs.
std::string input_digest(const std::vector<ComplexMatrix>& inputs);

nlohmann::json tolerances_to_json(const Tolerances& tol);
Tolerances tolerances_from_json(const nlohmann::json& j);

/// With an empty `side_stem` every matrix is inline; otherwise matrices of
/// dimension >= kInlineLimit go to "<side_stem>.<name>.json" next to the
/// certificate and are referenced by file name.
nlohmann::json certificate_to_json(const DecompositionCertificate& cert,
                                   const std::filesystem::path& side_stem = {});
DecompositionCertificate certificate_from_json(const nlohmann::json& j,
                                               const std::filesystem::path& base_dir = {});

std::string format_certificate(const DecompositionCertificate& cert, const std::filesystem::path& side_stem = {});
void write_certificate(const std::filesystem::path& path, const DecompositionCertificate& cert);
DecompositionCertificate read_certificate(const std::filesystem::path& path);

}  // namespace dixmier
