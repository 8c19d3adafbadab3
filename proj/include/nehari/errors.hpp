#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

enum class ErrorKind {
  ZeroField,
  NonFiniteValue,
  MeshMismatch,
  NotOnManifold,
  DegenerateConstraintGradient,
  DegenerateDirection,
  InvalidCoefficient,
  AssemblyFailure,
  LinearSolveFailure,
  LineSearchFailure,
  EigenSolveFailure,
  InvalidBracket,
  InsufficientData,
  NonPositiveData,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class NehariError : public std::runtime_error {
 public:
  NehariError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nehari
