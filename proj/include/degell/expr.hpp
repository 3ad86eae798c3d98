#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "degell/mesh.hpp"

namespace degell {

/// Closed-grammar scalar expression in the coordinates x and y.
///
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := ('+'|'-') unary | factor
///   factor := base ('^' number)?
///   base   := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | exp | abs | min | max     (min/max take two args)
///
/// Parsed once into a postfix program; evaluation is pure and thread-safe.
class ScalarExpr {
 public:
  /// The constant zero.
  ScalarExpr();

  /// Throws ParseError with a 1-based column (line is always 1).
  static ScalarExpr parse(std::string_view text);
  static ScalarExpr constant(double value);

  /// Throws Error(Evaluation) naming the point when the result is not finite.
  [[nodiscard]] double operator()(double x, double y = 0.0) const;
  [[nodiscard]] double operator()(const Point& p) const { return (*this)(p[0], p[1]); }

  /// Evaluation without the finiteness check.
  [[nodiscard]] double evaluate_raw(double x, double y) const noexcept;

  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::optional<double> constant_value() const;
  [[nodiscard]] bool is_zero() const;

  struct Instruction;

 private:
  std::shared_ptr<const std::vector<Instruction>> program_;
  std::string source_;
};

}  // namespace degell
