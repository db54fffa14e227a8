#pragma once

#include <memory>
#include <string>
#include <vector>

#include "invariset/types.hpp"

namespace invariset {

/// Expression AST over variables x1..xn.
///
/// Grammar (whitespace insignificant):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' uint)?
///   base   := literal | var | 'sqrt' '(' expr ')' | '(' expr ')' | '-' base
class Expr {
 public:
  enum class Kind { Literal, Var, Add, Sub, Mul, Div, Pow, Neg, Sqrt };

  struct Node {
    Kind kind;
    double value = 0.0;   // Literal
    int var = 0;          // Var, zero-based
    int exponent = 0;     // Pow
    std::shared_ptr<const Node> a, b;
  };

  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root, int n) : root_(std::move(root)), n_(n) {}

  const Node* root() const { return root_.get(); }
  int num_vars() const { return n_; }
  bool empty() const { return root_ == nullptr; }

 private:
  std::shared_ptr<const Node> root_;
  int n_ = 0;
};

/// Parses `text` with variables x1..xn. Throws ExprSyntaxError / UnknownVariable.
Expr parse_expr(const std::string& text, int n);

/// Standard semantics; sqrt of a negative throws DomainError, division by an
/// exact zero throws DivisionByZero.
double evaluate(const Expr& e, const Vec& x);

/// Re-parseable textual form (fully parenthesized).
std::string to_string(const Expr& e);

/// Expands a division- and sqrt-free expression into a multi-index term list.
/// Division by constant subexpressions is allowed. Throws NotPolynomial.
std::vector<PolynomialTerm> expand_polynomial(const Expr& e, int n);

}  // namespace invariset
