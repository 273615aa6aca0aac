#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "smfg/error.hpp"

namespace smfg::app {

enum class NodeKind { Number, VarX, VarY, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Function { Sin, Cos, Exp, Log, Sqrt, Abs };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree. Binary nodes use lhs and rhs, Neg and Call
/// use lhs only.
struct Expr {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;
  Function function = Function::Sin;
  ExprPtr lhs;
  ExprPtr rhs;
};

/// Syntax error with the byte offset where parsing stopped.
class ParseError : public UsageError {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Grammar, loosest to tightest: + -, then * /, then prefix -, then ^
/// (right associative). Atoms are decimal literals, x, y, pi, parenthesized
/// expressions and sin cos exp log sqrt abs applied to one parenthesized
/// argument. There is no unary plus and no implicit multiplication.
ExprPtr parse_expression(std::string_view source);

/// Evaluates at (x, y). Throws DomainError for log of a nonpositive or
/// sqrt of a negative argument.
double evaluate(const Expr& e, double x, double y = 0.0);

/// Fully parenthesized form with 17 significant digits per literal;
/// parse_expression(to_string(e)) rebuilds an identical tree.
std::string to_string(const Expr& e);

/// Structural equality.
bool same_tree(const Expr& a, const Expr& b);

bool uses_y(const Expr& e);

}  // namespace smfg::app
