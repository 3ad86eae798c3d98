#pragma once

#include <stdexcept>
#include <string>

namespace degell {

enum class ErrorKind {
  InvalidDomain,
  InvalidResolution,
  Parse,
  Evaluation,
  ComparabilityViolation,
  InvalidData,
  TransposeMismatch,
  Precondition,
  SingularSystem,
  CoercivityFailure,
  InvalidRequest,
  DegenerateSampling,
  NoPoincare,
  InvalidBall,
  InvalidInput,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the CLI)
/// can map it to an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);

  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }
  /// The message without the position prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

}  // namespace degell
