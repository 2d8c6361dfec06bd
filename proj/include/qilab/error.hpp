#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qilab {

enum class ErrorCode {
  DimensionMismatch,
  UnsupportedDimension,
  NotExactlyInvertible,
  InvalidArgument,
  InvalidPlan,
  EmptyPlan,
  EmptyProfile,
  AlphaOutOfRange,
  AlphaMismatch,
  NotOutsideH,
  InsufficientAnnuli,
  WitnessTooSparse,
  NotInIntersection,
  NotInH,
  NoSuitableR0,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status and tests can assert on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qilab
