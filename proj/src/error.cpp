#include "degell/error.hpp"

namespace degell {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDomain: return "invalid-domain";
    case ErrorKind::InvalidResolution: return "invalid-resolution";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::ComparabilityViolation: return "comparability-violation";
    case ErrorKind::InvalidData: return "invalid-data";
    case ErrorKind::TransposeMismatch: return "transpose-mismatch";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::CoercivityFailure: return "coercivity-failure";
    case ErrorKind::InvalidRequest: return "invalid-request";
    case ErrorKind::DegenerateSampling: return "degenerate-sampling";
    case ErrorKind::NoPoincare: return "no-poincare";
    case ErrorKind::InvalidBall: return "invalid-ball";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(ErrorKind::Parse, "line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + message),
      detail_(message),
      line_(line),
      column_(column) {}

}  // namespace degell
