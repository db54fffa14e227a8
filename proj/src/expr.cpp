#include "invariset/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "invariset/errors.hpp"

namespace invariset {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto node = std::make_shared<Expr::Node>();
  node->kind = kind;
  node->a = std::move(a);
  node->b = std::move(b);
  return node;
}

class Parser {
 public:
  Parser(const std::string& text, int n) : text_(text), n_(n) {}

  NodePtr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ExprSyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    while (true) {
      if (consume('+')) {
        lhs = make(Expr::Kind::Add, lhs, parse_term());
      } else if (consume('-')) {
        lhs = make(Expr::Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_factor();
    while (true) {
      if (consume('*')) {
        lhs = make(Expr::Kind::Mul, lhs, parse_factor());
      } else if (consume('/')) {
        lhs = make(Expr::Kind::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    auto base = parse_base();
    if (consume('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) throw ExprSyntaxError("expected integer exponent", pos_);
      auto node = std::make_shared<Expr::Node>();
      node->kind = Expr::Kind::Pow;
      node->exponent = std::atoi(text_.substr(start, pos_ - start).c_str());
      node->a = base;
      return node;
    }
    return base;
  }

  NodePtr parse_base() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return make(Expr::Kind::Neg, parse_base());
    }
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!consume(')')) throw ExprSyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double value = std::strtod(begin, &end);
      if (end == begin) throw ExprSyntaxError("expected number", pos_);
      pos_ += static_cast<std::size_t>(end - begin);
      auto node = std::make_shared<Expr::Node>();
      node->kind = Expr::Kind::Literal;
      node->value = value;
      return node;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])))) ++pos_;
      std::string word = text_.substr(start, pos_ - start);
      if (word == "sqrt") {
        if (!consume('(')) throw ExprSyntaxError("expected '(' after sqrt", pos_);
        auto e = parse_expr();
        if (!consume(')')) throw ExprSyntaxError("expected ')'", pos_);
        return make(Expr::Kind::Sqrt, e);
      }
      if (word.size() >= 2 && word[0] == 'x') {
        for (std::size_t i = 1; i < word.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(word[i])))
            throw ExprSyntaxError("unknown identifier '" + word + "'", start);
        int idx = std::atoi(word.c_str() + 1);
        if (idx < 1 || idx > n_)
          throw UnknownVariable("variable '" + word + "' outside x1..x" + std::to_string(n_));
        auto node = std::make_shared<Expr::Node>();
        node->kind = Expr::Kind::Var;
        node->var = idx - 1;
        return node;
      }
      throw ExprSyntaxError("unknown identifier '" + word + "'", start);
    }
    throw ExprSyntaxError("unexpected character", pos_);
  }

  const std::string& text_;
  int n_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node* node, const Vec& x) {
  switch (node->kind) {
    case Expr::Kind::Literal:
      return node->value;
    case Expr::Kind::Var:
      return x(node->var);
    case Expr::Kind::Add:
      return eval_node(node->a.get(), x) + eval_node(node->b.get(), x);
    case Expr::Kind::Sub:
      return eval_node(node->a.get(), x) - eval_node(node->b.get(), x);
    case Expr::Kind::Mul:
      return eval_node(node->a.get(), x) * eval_node(node->b.get(), x);
    case Expr::Kind::Div: {
      double den = eval_node(node->b.get(), x);
      if (den == 0.0) throw DivisionByZero("division by zero");
      return eval_node(node->a.get(), x) / den;
    }
    case Expr::Kind::Pow:
      return std::pow(eval_node(node->a.get(), x), node->exponent);
    case Expr::Kind::Neg:
      return -eval_node(node->a.get(), x);
    case Expr::Kind::Sqrt: {
      double v = eval_node(node->a.get(), x);
      if (v < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(v);
    }
  }
  throw Error("corrupt expression node");
}

void print_node(const Expr::Node* node, std::ostringstream& out) {
  switch (node->kind) {
    case Expr::Kind::Literal: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", node->value);
      out << buf;
      return;
    }
    case Expr::Kind::Var:
      out << "x" << (node->var + 1);
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const char* op = node->kind == Expr::Kind::Add   ? "+"
                       : node->kind == Expr::Kind::Sub ? "-"
                       : node->kind == Expr::Kind::Mul ? "*"
                                                       : "/";
      out << "(";
      print_node(node->a.get(), out);
      out << op;
      print_node(node->b.get(), out);
      out << ")";
      return;
    }
    case Expr::Kind::Pow:
      out << "(";
      print_node(node->a.get(), out);
      out << "^" << node->exponent << ")";
      return;
    case Expr::Kind::Neg:
      out << "(-";
      print_node(node->a.get(), out);
      out << ")";
      return;
    case Expr::Kind::Sqrt:
      out << "sqrt(";
      print_node(node->a.get(), out);
      out << ")";
      return;
  }
}

using TermMap = std::map<std::vector<int>, double>;

TermMap term_mul(const TermMap& a, const TermMap& b, int n) {
  TermMap out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(n);
      for (int i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  return out;
}

TermMap expand_node(const Expr::Node* node, int n) {
  switch (node->kind) {
    case Expr::Kind::Literal:
      return {{std::vector<int>(n, 0), node->value}};
    case Expr::Kind::Var: {
      std::vector<int> e(n, 0);
      e[node->var] = 1;
      return {{e, 1.0}};
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      TermMap out = expand_node(node->a.get(), n);
      double sign = node->kind == Expr::Kind::Add ? 1.0 : -1.0;
      for (const auto& [e, c] : expand_node(node->b.get(), n)) out[e] += sign * c;
      return out;
    }
    case Expr::Kind::Mul:
      return term_mul(expand_node(node->a.get(), n), expand_node(node->b.get(), n), n);
    case Expr::Kind::Div: {
      TermMap den = expand_node(node->b.get(), n);
      double constant = 0.0;
      for (const auto& [e, c] : den) {
        bool is_const = true;
        for (int v : e) is_const = is_const && v == 0;
        if (!is_const && c != 0.0)
          throw NotPolynomial("division by a variable-dependent expression");
        if (is_const) constant = c;
      }
      if (constant == 0.0) throw DivisionByZero("division by zero constant");
      TermMap out = expand_node(node->a.get(), n);
      for (auto& [e, c] : out) c /= constant;
      return out;
    }
    case Expr::Kind::Pow: {
      TermMap base = expand_node(node->a.get(), n);
      TermMap out = {{std::vector<int>(n, 0), 1.0}};
      for (int i = 0; i < node->exponent; ++i) out = term_mul(out, base, n);
      return out;
    }
    case Expr::Kind::Neg: {
      TermMap out = expand_node(node->a.get(), n);
      for (auto& [e, c] : out) c = -c;
      return out;
    }
    case Expr::Kind::Sqrt:
      throw NotPolynomial("sqrt is not polynomial");
  }
  throw Error("corrupt expression node");
}

}  // namespace

Expr parse_expr(const std::string& text, int n) {
  return Expr(Parser(text, n).parse(), n);
}

double evaluate(const Expr& e, const Vec& x) {
  if (e.empty()) throw Error("empty expression");
  if (x.size() != e.num_vars())
    throw DimensionMismatch("expression expects " + std::to_string(e.num_vars()) +
                            " variables, got " + std::to_string(x.size()));
  return eval_node(e.root(), x);
}

std::string to_string(const Expr& e) {
  if (e.empty()) return "";
  std::ostringstream out;
  print_node(e.root(), out);
  return out.str();
}

std::vector<PolynomialTerm> expand_polynomial(const Expr& e, int n) {
  if (e.empty()) throw Error("empty expression");
  TermMap map = expand_node(e.root(), n);
  std::vector<PolynomialTerm> terms;
  for (const auto& [alpha, coeff] : map)
    if (coeff != 0.0) terms.push_back({alpha, coeff});
  return terms;
}

}  // namespace invariset
