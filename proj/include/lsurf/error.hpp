#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lsurf {

enum class ErrorCode {
  BadInput,
  ConstraintDrift,
  CornerMismatch,
  DegenerateSpan,
  DivisionBySingularJet,
  DomainError,
  DomainViolation,
  IllConditionedFit,
  InsufficientSamples,
  InvalidOrder,
  MinimalPoint,
  NotNullCoordinates,
  NotQuasiMinimal,
  OutOfDomain,
  PicardDivergence,
  QuasiMinimalityViolated,
  SyntaxError,
  UnknownIdentifier,
};

const char* error_code_name(ErrorCode code);

// Exception carrying a machine-readable code plus key/value details that the
// CLI serializes into its structured error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  Error& with(const std::string& key, const std::string& value) {
    details_.emplace_back(key, value);
    return *this;
  }
  Error& with(const std::string& key, double value);

  const std::vector<std::pair<std::string, std::string>>& details() const {
    return details_;
  }

 private:
  ErrorCode code_;
  std::vector<std::pair<std::string, std::string>> details_;
};

}  // namespace lsurf
