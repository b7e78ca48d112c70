#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dqo {

enum class ErrorCode {
  InvalidDimension,
  InvalidParameter,
  UnsupportedScheme,
  DegenerateOutput,
  UnsupportedPlant,
  NotPositiveDefinite,
  BoundViolated,
  InvalidInput,
  NumericalFailure,
  ToleranceExceeded,
  StepTooCoarse,
  ParseError,
  ValidationError,
  IoError,
  CertificateFailed,
  OracleDisagreement,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the core library. `value()` carries the offending
/// numeric quantity when there is one (e.g. lambda_min for NotPositiveDefinite,
/// the residual for ToleranceExceeded), NaN otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, double value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), value_(value) {}

  ErrorCode code() const noexcept { return code_; }
  double value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  double value_;
};

}  // namespace dqo
