#include "posefuse/error.hpp"

namespace posefuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::BadInformation: return "BadInformation";
    case ErrorCode::GaugeUnderconstrained: return "GaugeUnderconstrained";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::OutOfUtmDomain: return "OutOfUtmDomain";
    case ErrorCode::TooFewReadings: return "TooFewReadings";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NeedTwoPoses: return "NeedTwoPoses";
    case ErrorCode::DivisionByZeroMetric: return "DivisionByZeroMetric";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::MixedUtmZones: return "MixedUtmZones";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace posefuse
