#include "idepca/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace idepca {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < source.size()) {
    char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (digit(c) || (c == '.' && i + 1 < source.size() && digit(source[i + 1]))) {
      while (i < source.size() && digit(source[i])) ++i;
      if (i < source.size() && source[i] == '.') {
        ++i;
        while (i < source.size() && digit(source[i])) ++i;
      }
      if (i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t mark = i;
        ++i;
        if (i < source.size() && (source[i] == '+' || source[i] == '-')) ++i;
        if (i < source.size() && digit(source[i])) {
          while (i < source.size() && digit(source[i])) ++i;
        } else {
          i = mark;  // "1e" not followed by digits: the e belongs to the next token
        }
      }
      std::string text(source.substr(start, i - start));
      errno = 0;
      char* end = nullptr;
      double value = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size() || !std::isfinite(value)) {
        throw ParseError("number literal '" + text + "' is out of range", start);
      }
      tokens.push_back({TokenKind::Number, std::move(text), start});
      continue;
    }
    if (ident_start(c)) {
      while (i < source.size() && ident_char(source[i])) ++i;
      tokens.push_back({TokenKind::Identifier, std::string(source.substr(start, i - start)), start});
      continue;
    }
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '/':
      case '^':
        tokens.push_back({TokenKind::Operator, std::string(1, c), start});
        ++i;
        continue;
      case '(':
        tokens.push_back({TokenKind::LeftParen, "(", start});
        ++i;
        continue;
      case ')':
        tokens.push_back({TokenKind::RightParen, ")", start});
        ++i;
        continue;
      case ',':
        tokens.push_back({TokenKind::Comma, ",", start});
        ++i;
        continue;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  return tokens;
}

// Recursive descent over the token stream. Precedence, loosest first:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?          right associative; binds above '-'
//   atom   := number | identifier | name '(' expr (',' expr)? ')' | '(' expr ')'
class Expr::Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::string_view variable, Expr& out)
      : tokens_(tokens), variable_(variable), out_(out) {}

  void run() {
    out_.root_ = parse_expr();
    if (pos_ < tokens_.size()) {
      throw ParseError("unexpected '" + tokens_[pos_].text + "' after expression",
                       tokens_[pos_].position);
    }
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  bool accept_op(const char* text) {
    const Token* t = peek();
    if (t && t->kind == TokenKind::Operator && t->text == text) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t here() const {
    return pos_ < tokens_.size() ? tokens_[pos_].position
                                 : (tokens_.empty() ? 0 : tokens_.back().position + tokens_.back().text.size());
  }

  std::int32_t add(Node n) {
    out_.nodes_.push_back(n);
    return static_cast<std::int32_t>(out_.nodes_.size() - 1);
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      if (accept_op("+")) {
        std::int32_t rhs = parse_term();
        lhs = add({NodeKind::Binary, BinaryOp::Add, Builtin::Exp, 0.0, lhs, rhs});
      } else if (accept_op("-")) {
        std::int32_t rhs = parse_term();
        lhs = add({NodeKind::Binary, BinaryOp::Sub, Builtin::Exp, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_factor();
    for (;;) {
      if (accept_op("*")) {
        std::int32_t rhs = parse_factor();
        lhs = add({NodeKind::Binary, BinaryOp::Mul, Builtin::Exp, 0.0, lhs, rhs});
      } else if (accept_op("/")) {
        std::int32_t rhs = parse_factor();
        lhs = add({NodeKind::Binary, BinaryOp::Div, Builtin::Exp, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_factor() {
    if (accept_op("-")) {
      std::int32_t inner = parse_factor();
      return add({NodeKind::Negate, BinaryOp::Add, Builtin::Exp, 0.0, inner, -1});
    }
    return parse_power();
  }

  std::int32_t parse_power() {
    std::int32_t base = parse_atom();
    if (accept_op("^")) {
      std::int32_t exponent = parse_factor();
      return add({NodeKind::Binary, BinaryOp::Pow, Builtin::Exp, 0.0, base, exponent});
    }
    return base;
  }

  std::int32_t parse_atom() {
    const Token* t = peek();
    if (!t) throw ParseError("unexpected end of expression", here());
    if (t->kind == TokenKind::Number) {
      ++pos_;
      double value = std::strtod(t->text.c_str(), nullptr);
      return add({NodeKind::Constant, BinaryOp::Add, Builtin::Exp, value, -1, -1});
    }
    if (t->kind == TokenKind::LeftParen) {
      ++pos_;
      std::int32_t inner = parse_expr();
      expect_rparen();
      return inner;
    }
    if (t->kind == TokenKind::Identifier) {
      ++pos_;
      const std::string& name = t->text;
      const Token* next = peek();
      if (next && next->kind == TokenKind::LeftParen) return parse_call(name, t->position);
      if (name == "pi")
        return add({NodeKind::Constant, BinaryOp::Add, Builtin::Exp, M_PI, -1, -1});
      if (name == "e") return add({NodeKind::Constant, BinaryOp::Add, Builtin::Exp, M_E, -1, -1});
      if (name == variable_) {
        out_.constant_ = false;
        return add({NodeKind::Variable, BinaryOp::Add, Builtin::Exp, 0.0, -1, -1});
      }
      throw ParseError("unknown identifier '" + name + "' (the variable here is '" +
                           std::string(variable_) + "')",
                       t->position);
    }
    throw ParseError("unexpected '" + t->text + "'", t->position);
  }

  std::int32_t parse_call(const std::string& name, std::size_t at) {
    struct Entry {
      const char* name;
      Builtin fn;
      int arity;
    };
    static constexpr Entry kTable[] = {
        {"exp", Builtin::Exp, 1}, {"ln", Builtin::Ln, 1},     {"sin", Builtin::Sin, 1},
        {"cos", Builtin::Cos, 1}, {"abs", Builtin::Abs, 1},   {"sqrt", Builtin::Sqrt, 1},
        {"min", Builtin::Min, 2}, {"max", Builtin::Max, 2},   {"floor", Builtin::Floor, 1},
    };
    const Entry* entry = nullptr;
    for (const Entry& e : kTable) {
      if (name == e.name) {
        entry = &e;
        break;
      }
    }
    if (!entry) throw ParseError("unknown function '" + name + "'", at);
    ++pos_;  // consume '('
    std::int32_t first = parse_expr();
    std::int32_t second = -1;
    if (entry->arity == 2) {
      const Token* t = peek();
      if (!t || t->kind != TokenKind::Comma) {
        throw ParseError("'" + name + "' takes two arguments", here());
      }
      ++pos_;
      second = parse_expr();
    }
    expect_rparen();
    return add({NodeKind::Call, BinaryOp::Add, entry->fn, 0.0, first, second});
  }

  void expect_rparen() {
    const Token* t = peek();
    if (!t || t->kind != TokenKind::RightParen) throw ParseError("expected ')'", here());
    ++pos_;
  }

  const std::vector<Token>& tokens_;
  std::string_view variable_;
  Expr& out_;
  std::size_t pos_ = 0;
};

Expr::Expr() : root_(0), constant_(true), variable_("t"), source_("0") {
  nodes_.push_back({NodeKind::Constant, BinaryOp::Add, Builtin::Exp, 0.0, -1, -1});
}

Expr Expr::parse(std::string_view source, std::string_view variable) {
  std::vector<Token> tokens = tokenize(source);
  if (tokens.empty()) throw ParseError("empty expression", 0);
  Expr result;
  result.nodes_.clear();
  result.constant_ = true;
  result.variable_ = std::string(variable);
  result.source_ = std::string(source);
  Parser parser(tokens, variable, result);
  parser.run();
  return result;
}

Expr Expr::constant(double value) {
  Expr result;
  result.nodes_[0].number = value;
  result.source_ = format_double(value);
  return result;
}

bool Expr::is_zero() const { return constant_ && eval(0.0) == 0.0; }

double Expr::eval(double argument) const { return eval_node(root_, argument); }

double Expr::eval_node(std::int32_t index, double argument) const {
  const Node& n = nodes_[index];
  double result;
  switch (n.kind) {
    case NodeKind::Constant:
      return n.number;
    case NodeKind::Variable:
      return argument;
    case NodeKind::Negate:
      return -eval_node(n.lhs, argument);
    case NodeKind::Binary: {
      double a = eval_node(n.lhs, argument);
      double b = eval_node(n.rhs, argument);
      switch (n.op) {
        case BinaryOp::Add: result = a + b; break;
        case BinaryOp::Sub: result = a - b; break;
        case BinaryOp::Mul: result = a * b; break;
        case BinaryOp::Div:
          if (b == 0.0) throw EvalError("division by zero");
          result = a / b;
          break;
        case BinaryOp::Pow:
          if (a < 0.0 && b != std::floor(b)) {
            throw EvalError("fractional power of a negative base");
          }
          if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
          result = std::pow(a, b);
          break;
        default: result = 0.0; break;
      }
      break;
    }
    case NodeKind::Call: {
      double a = eval_node(n.lhs, argument);
      switch (n.fn) {
        case Builtin::Exp: result = std::exp(a); break;
        case Builtin::Ln:
          if (a <= 0.0) throw EvalError("ln of a nonpositive value");
          result = std::log(a);
          break;
        case Builtin::Sin: result = std::sin(a); break;
        case Builtin::Cos: result = std::cos(a); break;
        case Builtin::Abs: result = std::fabs(a); break;
        case Builtin::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative value");
          result = std::sqrt(a);
          break;
        case Builtin::Min: result = std::fmin(a, eval_node(n.rhs, argument)); break;
        case Builtin::Max: result = std::fmax(a, eval_node(n.rhs, argument)); break;
        case Builtin::Floor: result = std::floor(a); break;
        default: result = 0.0; break;
      }
      break;
    }
    default:
      result = 0.0;
      break;
  }
  if (!std::isfinite(result)) throw EvalError("evaluation overflowed");
  return result;
}

std::string Expr::str() const {
  std::string out;
  print_node(root_, out);
  return out;
}

void Expr::print_node(std::int32_t index, std::string& out) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case NodeKind::Constant:
      out += format_double(n.number);
      break;
    case NodeKind::Variable:
      out += variable_;
      break;
    case NodeKind::Negate:
      out += "(-";
      print_node(n.lhs, out);
      out += ")";
      break;
    case NodeKind::Binary: {
      static const char* kOps[] = {"+", "-", "*", "/", "^"};
      out += "(";
      print_node(n.lhs, out);
      out += kOps[static_cast<int>(n.op)];
      print_node(n.rhs, out);
      out += ")";
      break;
    }
    case NodeKind::Call: {
      static const char* kNames[] = {"exp", "ln", "sin", "cos", "abs", "sqrt", "min", "max", "floor"};
      out += kNames[static_cast<int>(n.fn)];
      out += "(";
      print_node(n.lhs, out);
      if (n.rhs >= 0) {
        out += ", ";
        print_node(n.rhs, out);
      }
      out += ")";
      break;
    }
  }
}

}  // namespace idepca
