#include "qilab/error.hpp"

namespace qilab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NotExactlyInvertible: return "NotExactlyInvertible";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::EmptyPlan: return "EmptyPlan";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::AlphaMismatch: return "AlphaMismatch";
    case ErrorCode::NotOutsideH: return "NotOutsideH";
    case ErrorCode::InsufficientAnnuli: return "InsufficientAnnuli";
    case ErrorCode::WitnessTooSparse: return "WitnessTooSparse";
    case ErrorCode::NotInIntersection: return "NotInIntersection";
    case ErrorCode::NotInH: return "NotInH";
    case ErrorCode::NoSuitableR0: return "NoSuitableR0";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace qilab
