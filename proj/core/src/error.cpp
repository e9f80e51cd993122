#include "whgrav/error.hpp"

namespace whgrav {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::BranchPoint: return "branch_point";
    case ErrorKind::SingularDerivative: return "singular_derivative";
    case ErrorKind::ZeroOnContour: return "zero_on_contour";
    case ErrorKind::Resolution: return "insufficient_resolution";
    case ErrorKind::NoCanonicalFactorization: return "no_canonical_factorization";
    case ErrorKind::InadmissibleContour: return "inadmissible_contour";
    case ErrorKind::ContourMismatch: return "different_contour";
    case ErrorKind::NotCosetRepresentative: return "not_coset_representative";
    case ErrorKind::Verification: return "verification_failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, nlohmann::json detail)
    : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

nlohmann::json Error::to_json() const {
  nlohmann::json out{{"error", std::string(to_string(kind_))}, {"message", what()}};
  if (!detail_.empty()) out["detail"] = detail_;
  return out;
}

}  // namespace whgrav
