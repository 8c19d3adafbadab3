#include "nehari/errors.hpp"

namespace nehari {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::NotOnManifold: return "NotOnManifold";
    case ErrorKind::DegenerateConstraintGradient: return "DegenerateConstraintGradient";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::InvalidCoefficient: return "InvalidCoefficient";
    case ErrorKind::AssemblyFailure: return "AssemblyFailure";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::EigenSolveFailure: return "EigenSolveFailure";
    case ErrorKind::InvalidBracket: return "InvalidBracket";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonPositiveData: return "NonPositiveData";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nehari
