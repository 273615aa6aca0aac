#include "smfg/app/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace smfg::app {

namespace {

struct FunctionName {
  std::string_view name;
  Function function;
};

constexpr std::array<FunctionName, 6> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

std::string_view name_of(Function f) {
  for (const auto& entry : kFunctions) {
    if (entry.function == f) return entry.name;
  }
  return "?";
}

ExprPtr leaf(NodeKind kind, double value = 0.0) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->value = value;
  return e;
}

ExprPtr node(NodeKind kind, ExprPtr lhs, ExprPtr rhs = nullptr) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

// Binding powers.
constexpr int kAdditive = 10;
constexpr int kMultiplicative = 20;
constexpr int kPrefix = 30;
constexpr int kPower = 40;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    ExprPtr e = expression(0);
    skip_space();
    if (pos_ < src_.size()) fail("an operator or end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  [[noreturn]] void fail(std::string expected) {
    skip_space();
    std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'"
                                           : "end of input";
    throw ParseError(pos_, std::move(expected), std::move(found));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  ExprPtr expression(int min_bp) {
    ExprPtr lhs = prefix();
    for (;;) {
      const char op = peek();
      int left_bp = 0;
      int right_bp = 0;
      NodeKind kind{};
      switch (op) {
        case '+': kind = NodeKind::Add; left_bp = kAdditive; right_bp = kAdditive + 1; break;
        case '-': kind = NodeKind::Sub; left_bp = kAdditive; right_bp = kAdditive + 1; break;
        case '*': kind = NodeKind::Mul; left_bp = kMultiplicative; right_bp = kMultiplicative + 1; break;
        case '/': kind = NodeKind::Div; left_bp = kMultiplicative; right_bp = kMultiplicative + 1; break;
        case '^': kind = NodeKind::Pow; left_bp = kPower; right_bp = kPower - 1; break;
        default: return lhs;
      }
      if (left_bp < min_bp) return lhs;
      ++pos_;
      ExprPtr rhs = expression(right_bp);
      lhs = node(kind, std::move(lhs), std::move(rhs));
    }
  }

  ExprPtr prefix() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return node(NodeKind::Neg, expression(kPrefix));
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expression(0);
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("an operand");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("a digit");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark + 1;
        fail("exponent digits");
      }
    }
    double value = 0.0;
    const auto [end, ec] =
        std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || end != src_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("a finite number");
    }
    return leaf(NodeKind::Number, value);
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    const std::string_view word = src_.substr(start, pos_ - start);
    if (word == "x") return leaf(NodeKind::VarX);
    if (word == "y") return leaf(NodeKind::VarY);
    if (word == "pi") return leaf(NodeKind::Pi);
    for (const auto& entry : kFunctions) {
      if (entry.name != word) continue;
      expect('(');
      auto call = std::make_shared<Expr>();
      call->kind = NodeKind::Call;
      call->function = entry.function;
      call->lhs = expression(0);
      expect(')');
      return call;
    }
    pos_ = start;
    throw ParseError(start, "x, y, pi or a function name",
                     "unknown identifier '" + std::string(word) + "'");
  }
};

void append(std::string& out, const Expr& e) {
  switch (e.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      out += buf;
      return;
    }
    case NodeKind::VarX: out += 'x'; return;
    case NodeKind::VarY: out += 'y'; return;
    case NodeKind::Pi: out += "pi"; return;
    case NodeKind::Neg:
      out += "(-";
      append(out, *e.lhs);
      out += ')';
      return;
    case NodeKind::Call:
      out += name_of(e.function);
      out += '(';
      append(out, *e.lhs);
      out += ')';
      return;
    default: break;
  }
  char op = '+';
  switch (e.kind) {
    case NodeKind::Sub: op = '-'; break;
    case NodeKind::Mul: op = '*'; break;
    case NodeKind::Div: op = '/'; break;
    case NodeKind::Pow: op = '^'; break;
    default: break;
  }
  out += '(';
  append(out, *e.lhs);
  out += ' ';
  out += op;
  out += ' ';
  append(out, *e.rhs);
  out += ')';
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string expected,
                       std::string found)
    : UsageError("syntax error at offset " + std::to_string(offset) +
                 ": expected " + expected + ", found " + found),
      offset_(offset),
      expected_(std::move(expected)) {}

ExprPtr parse_expression(std::string_view source) {
  return Parser(source).parse();
}

double evaluate(const Expr& e, double x, double y) {
  switch (e.kind) {
    case NodeKind::Number: return e.value;
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Pi: return std::numbers::pi;
    case NodeKind::Neg: return -evaluate(*e.lhs, x, y);
    case NodeKind::Add: return evaluate(*e.lhs, x, y) + evaluate(*e.rhs, x, y);
    case NodeKind::Sub: return evaluate(*e.lhs, x, y) - evaluate(*e.rhs, x, y);
    case NodeKind::Mul: return evaluate(*e.lhs, x, y) * evaluate(*e.rhs, x, y);
    case NodeKind::Div: return evaluate(*e.lhs, x, y) / evaluate(*e.rhs, x, y);
    case NodeKind::Pow:
      return std::pow(evaluate(*e.lhs, x, y), evaluate(*e.rhs, x, y));
    case NodeKind::Call: break;
  }
  const double a = evaluate(*e.lhs, x, y);
  switch (e.function) {
    case Function::Sin: return std::sin(a);
    case Function::Cos: return std::cos(a);
    case Function::Exp: return std::exp(a);
    case Function::Log:
      if (!(a > 0.0)) {
        throw DomainError("log of nonpositive argument " + std::to_string(a));
      }
      return std::log(a);
    case Function::Sqrt:
      if (!(a >= 0.0)) {
        throw DomainError("sqrt of negative argument " + std::to_string(a));
      }
      return std::sqrt(a);
    case Function::Abs: return std::abs(a);
  }
  return a;
}

std::string to_string(const Expr& e) {
  std::string out;
  append(out, e);
  return out;
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return a.value == b.value && std::signbit(a.value) == std::signbit(b.value);
    case NodeKind::VarX:
    case NodeKind::VarY:
    case NodeKind::Pi: return true;
    case NodeKind::Neg: return same_tree(*a.lhs, *b.lhs);
    case NodeKind::Call:
      return a.function == b.function && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

bool uses_y(const Expr& e) {
  if (e.kind == NodeKind::VarY) return true;
  return (e.lhs && uses_y(*e.lhs)) || (e.rhs && uses_y(*e.rhs));
}

}  // namespace smfg::app
