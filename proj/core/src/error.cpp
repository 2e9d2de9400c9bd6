#include "qmkdv/error.hpp"

namespace qmkdv {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::UnresolvedSymbol: return "UnresolvedSymbol";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::ZeroFrequency: return "ZeroFrequency";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::UnresolvedOscillation: return "UnresolvedOscillation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace qmkdv
