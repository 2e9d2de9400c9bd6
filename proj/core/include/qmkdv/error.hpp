#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmkdv {

enum class ErrorKind {
  NonZeroMean,
  GridMismatch,
  UnresolvedSymbol,
  DegenerateInput,
  ZeroFrequency,
  StepUnderflow,
  NonMonotoneTime,
  InsufficientData,
  UnresolvedOscillation,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qmkdv
