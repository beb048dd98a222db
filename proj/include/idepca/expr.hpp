#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace idepca {

// Lexical or syntax problem in an expression or a problem file. Carries a
// byte offset into the source that produced it.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation left the reals: log of a nonpositive value, sqrt of a negative,
// division by zero, fractional power of a negative base, overflow.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TokenKind { Number, Identifier, Operator, LeftParen, RightParen, Comma };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position;  // byte offset of the first character
};

// Splits source into tokens. Whitespace separates tokens and is dropped;
// anything unrecognized raises ParseError.
std::vector<Token> tokenize(std::string_view source);

// An arithmetic expression in one free variable ("t" for coefficients and
// initial functions, "i" for impulse coefficients). Immutable after parse;
// eval is pure and safe to call concurrently.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr parse(std::string_view source, std::string_view variable);
  static Expr constant(double value);

  double eval(double argument) const;

  // True when the variable does not occur, i.e. eval is the same everywhere.
  bool is_constant() const noexcept { return constant_; }
  // True for a constant expression whose value is exactly zero.
  bool is_zero() const;

  const std::string& variable() const noexcept { return variable_; }
  const std::string& source() const noexcept { return source_; }

  // Fully parenthesized form; parsing it back yields an expression whose
  // eval matches bit for bit.
  std::string str() const;

 private:
  enum class NodeKind : std::uint8_t { Constant, Variable, Negate, Binary, Call };
  enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };
  enum class Builtin : std::uint8_t { Exp, Ln, Sin, Cos, Abs, Sqrt, Min, Max, Floor };

  struct Node {
    NodeKind kind;
    BinaryOp op;
    Builtin fn;
    double number;
    std::int32_t lhs;
    std::int32_t rhs;
  };

  class Parser;

  double eval_node(std::int32_t index, double argument) const;
  void print_node(std::int32_t index, std::string& out) const;

  std::vector<Node> nodes_;
  std::int32_t root_;
  bool constant_;
  std::string variable_;
  std::string source_;
};

}  // namespace idepca
