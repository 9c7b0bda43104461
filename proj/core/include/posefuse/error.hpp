#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posefuse {

enum class ErrorCode {
  InvalidArgument,
  UnknownNode,
  BadInformation,
  GaugeUnderconstrained,
  SingularSystem,
  InsufficientCoverage,
  OutOfUtmDomain,
  TooFewReadings,
  EmptyInput,
  NeedTwoPoses,
  DivisionByZeroMetric,
  ParseError,
  NonMonotonicTimestamps,
  MixedUtmZones,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posefuse
