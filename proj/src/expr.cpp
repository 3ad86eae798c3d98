#include "degell/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "degell/error.hpp"

namespace degell {

enum class OpCode { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs, Min, Max };

struct ScalarExpr::Instruction {
  OpCode op;
  double value = 0.0;
};

namespace {

using Program = std::vector<ScalarExpr::Instruction>;

constexpr std::size_t kMaxStack = 64;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program run() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    parse_expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    if (max_depth() > kMaxStack) fail("expression nested too deeply");
    return std::move(program_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, 1, static_cast<int>(pos_) + 1);
  }

  std::size_t max_depth() const {
    std::size_t depth = 0;
    std::size_t deepest = 0;
    for (const auto& ins : program_) {
      switch (ins.op) {
        case OpCode::Const:
        case OpCode::X:
        case OpCode::Y: ++depth; break;
        case OpCode::Add:
        case OpCode::Sub:
        case OpCode::Mul:
        case OpCode::Div:
        case OpCode::Min:
        case OpCode::Max: --depth; break;
        default: break;
      }
      deepest = std::max(deepest, depth);
    }
    return deepest;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of expression");
      fail(std::string("expected '") + c + "' but found '" + text_[pos_] + "'");
    }
  }

  void emit(OpCode op, double value = 0.0) { program_.push_back({op, value}); }

  void parse_expr() {
    parse_term();
    for (;;) {
      if (accept('+')) {
        parse_term();
        emit(OpCode::Add);
      } else if (accept('-')) {
        parse_term();
        emit(OpCode::Sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(OpCode::Mul);
      } else if (accept('/')) {
        parse_unary();
        emit(OpCode::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(OpCode::Neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_factor();
    }
  }

  void parse_factor() {
    parse_base();
    if (accept('^')) {
      skip_space();
      double sign = 1.0;
      if (accept('-')) {
        sign = -1.0;
      } else {
        accept('+');
      }
      skip_space();
      if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        fail("exponent must be a number");
      }
      emit(OpCode::Pow, sign * parse_number());
    }
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number '" + std::string(first, last) + "'");
    }
    return value;
  }

  void parse_base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      emit(OpCode::Const, parse_number());
      return;
    }
    if (c == '(') {
      ++pos_;
      parse_expr();
      expect(')');
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return emit(OpCode::X);
      if (name == "y") return emit(OpCode::Y);
      if (name == "pi") return emit(OpCode::Const, std::numbers::pi);

      static constexpr std::array<std::pair<std::string_view, OpCode>, 6> functions{{
          {"sin", OpCode::Sin},
          {"cos", OpCode::Cos},
          {"exp", OpCode::Exp},
          {"abs", OpCode::Abs},
          {"min", OpCode::Min},
          {"max", OpCode::Max},
      }};
      for (const auto& [fname, op] : functions) {
        if (name != fname) continue;
        expect('(');
        parse_expr();
        if (op == OpCode::Min || op == OpCode::Max) {
          expect(',');
          parse_expr();
        }
        expect(')');
        emit(op);
        return;
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Program program_;
};

}  // namespace

ScalarExpr::ScalarExpr()
    : program_(std::make_shared<const Program>(Program{{OpCode::Const, 0.0}})), source_("0") {}

ScalarExpr ScalarExpr::parse(std::string_view text) {
  ScalarExpr e;
  e.program_ = std::make_shared<const Program>(Parser(text).run());
  e.source_ = std::string(text);
  return e;
}

ScalarExpr ScalarExpr::constant(double value) {
  ScalarExpr e;
  e.program_ = std::make_shared<const Program>(Program{{OpCode::Const, value}});
  std::ostringstream os;
  os.precision(17);
  os << value;
  e.source_ = os.str();
  return e;
}

double ScalarExpr::evaluate_raw(double x, double y) const noexcept {
  // Stack depth is checked at parse time.
  std::array<double, kMaxStack> stack{};
  std::size_t top = 0;
  for (const auto& ins : *program_) {
    switch (ins.op) {
      case OpCode::Const: stack[top++] = ins.value; break;
      case OpCode::X: stack[top++] = x; break;
      case OpCode::Y: stack[top++] = y; break;
      case OpCode::Add: --top; stack[top - 1] += stack[top]; break;
      case OpCode::Sub: --top; stack[top - 1] -= stack[top]; break;
      case OpCode::Mul: --top; stack[top - 1] *= stack[top]; break;
      case OpCode::Div: --top; stack[top - 1] /= stack[top]; break;
      case OpCode::Pow: stack[top - 1] = std::pow(stack[top - 1], ins.value); break;
      case OpCode::Neg: stack[top - 1] = -stack[top - 1]; break;
      case OpCode::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case OpCode::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case OpCode::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case OpCode::Abs: stack[top - 1] = std::abs(stack[top - 1]); break;
      case OpCode::Min: --top; stack[top - 1] = std::min(stack[top - 1], stack[top]); break;
      case OpCode::Max: --top; stack[top - 1] = std::max(stack[top - 1], stack[top]); break;
    }
  }
  return stack[0];
}

double ScalarExpr::operator()(double x, double y) const {
  const double value = evaluate_raw(x, y);
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os.precision(17);
    os << "expression '" << source_ << "' is not finite at (" << x << ", " << y << ")";
    throw Error(ErrorKind::Evaluation, os.str());
  }
  return value;
}

std::optional<double> ScalarExpr::constant_value() const {
  for (const auto& ins : *program_) {
    if (ins.op == OpCode::X || ins.op == OpCode::Y) return std::nullopt;
  }
  return evaluate_raw(0.0, 0.0);
}

bool ScalarExpr::is_zero() const {
  const auto value = constant_value();
  return value && *value == 0.0;
}

}  // namespace degell
