#include "qilab/verdict.hpp"

namespace qilab {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Confirmed: return "Confirmed";
    case Status::Refuted: return "Refuted";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Analytic: return "Analytic";
    case CertificateKind::Sampled: return "Sampled";
    case CertificateKind::Derived: return "Derived";
  }
  return "Sampled";
}

}  // namespace qilab
