#include "dixmier/certificate.hpp"

#include <algorithm>

namespace dixmier {

const char* to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::pass: return "pass";
    case CertificateStatus::fail: return "fail";
    case CertificateStatus::feasibility_not_certified: return "feasibility-not-certified";
  }
  return "fail";
}

CertificateStatus certificate_status_from_string(const std::string& s) {
  if (s == "pass") return CertificateStatus::pass;
  if (s == "fail") return CertificateStatus::fail;
  if (s == "feasibility-not-certified") return CertificateStatus::feasibility_not_certified;
  throw ParseError("unknown certificate status '" + s + "'");
}

const ResidualEntry* DecompositionCertificate::residual(const std::string& name) const {
  auto it = std::find_if(residuals.begin(), residuals.end(),
                         [&](const ResidualEntry& r) { return r.name == name; });
  return it == residuals.end() ? nullptr : &*it;
}

bool DecompositionCertificate::all_residuals_pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const ResidualEntry& r) { return r.passed(); });
}

}  // namespace dixmier
