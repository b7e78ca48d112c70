#include "dqo/error.hpp"

namespace dqo {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid dimension";
    case ErrorCode::InvalidParameter: return "invalid parameter";
    case ErrorCode::UnsupportedScheme: return "unsupported scheme";
    case ErrorCode::DegenerateOutput: return "degenerate output";
    case ErrorCode::UnsupportedPlant: return "unsupported plant";
    case ErrorCode::NotPositiveDefinite: return "not positive definite";
    case ErrorCode::BoundViolated: return "bound violated";
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::NumericalFailure: return "numerical failure";
    case ErrorCode::ToleranceExceeded: return "tolerance exceeded";
    case ErrorCode::StepTooCoarse: return "step too coarse";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::ValidationError: return "validation error";
    case ErrorCode::IoError: return "i/o error";
    case ErrorCode::CertificateFailed: return "certificate failed";
    case ErrorCode::OracleDisagreement: return "oracle disagreement";
  }
  return "unknown error";
}

}  // namespace dqo
