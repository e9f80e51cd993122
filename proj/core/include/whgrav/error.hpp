#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace whgrav {

enum class ErrorKind {
  Config,
  Parse,
  Validation,
  Domain,
  Geometry,
  Evaluation,
  BranchPoint,
  SingularDerivative,
  ZeroOnContour,
  Resolution,
  NoCanonicalFactorization,
  InadmissibleContour,
  ContourMismatch,
  NotCosetRepresentative,
  Verification,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `detail` carries machine-readable
/// context such as a factorization index or a pole location.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        nlohmann::json detail = nlohmann::json::object());

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::json& detail() const noexcept { return detail_; }
  nlohmann::json to_json() const;

 private:
  ErrorKind kind_;
  nlohmann::json detail_;
};

}  // namespace whgrav
