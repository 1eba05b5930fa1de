#pragma once

// Named decomposition with its factors, residuals and verdict. Residuals are
// always recomputable from the stored inputs and factors.

#include <map>
#include <string>
#include <vector>

#include "dixmier/linalg.hpp"

namespace dixmier {

enum class CertificateStatus { pass, fail, feasibility_not_certified };

const char* to_string(CertificateStatus status);
CertificateStatus certificate_status_from_string(const std::string& s);

struct ResidualEntry {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool passed() const { return value <= threshold; }
};

struct DecompositionCertificate {
  std::string operation;
  std::string tool_version;
  std::string input_digest;
  Tolerances tolerances;
  std::vector<ComplexMatrix> inputs;
  std::map<std::string, ComplexMatrix> factors;
  std::map<std::string, double> scalars;
  std::vector<ResidualEntry> residuals;
  std::map<std::string, double> conditioning;
  std::map<std::string, std::string> notes;
  CertificateStatus status = CertificateStatus::fail;

  const ResidualEntry* residual(const std::string& name) const;
  bool all_residuals_pass() const;
};

}  // namespace dixmier
