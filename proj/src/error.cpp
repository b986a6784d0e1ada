#include "tumorsim/error.hpp"

namespace tumorsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::HistoryTooShort: return "HistoryTooShort";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::Instability: return "Instability";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace tumorsim
