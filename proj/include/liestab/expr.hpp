#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liestab/util.hpp"

namespace liestab {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class ExpressionTooLarge : public Error {
 public:
  using Error::Error;
};

enum class ExprKind {
  Constant,
  Variable,
  Sin,
  Cos,
  Exp,
  Pow,   // integer exponent >= 0
  Div,
  Mul,   // n-ary
  Add,   // n-ary
  Neg,   // erased by simplify()
  Sub,   // erased by simplify()
};

/// Immutable expression tree over variables x1..xn. Cheap to copy and share;
/// all operations below are pure, so Expr values can cross threads freely.
class Expr {
 public:
  Expr();  // constant 0

  ExprKind kind() const { return node_->kind; }
  double constant_value() const { return node_->value; }
  int var_index() const { return node_->index; }  // 1-based
  int exponent() const { return node_->index; }
  std::span<const Expr> children() const { return node_->kids; }

  bool is_constant(double v) const {
    return node_->kind == ExprKind::Constant && node_->value == v;
  }

  static Expr make(ExprKind kind, double value, int index, std::vector<Expr> kids);

 private:
  struct Node {
    ExprKind kind;
    double value = 0.0;  // Constant
    int index = 0;       // Variable index / Pow exponent
    std::vector<Expr> kids;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Factories (raw nodes; use simplify() for the canonical form).
Expr constant(double c);
Expr var(int index);
Expr sin(Expr a);
Expr cos(Expr a);
Expr exp(Expr a);
Expr neg(Expr a);
Expr pow(Expr base, int exponent);
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);

std::size_t node_count(const Expr& e);
int max_var_index(const Expr& e);

/// Deterministic total order on trees; the basis of the canonical form.
int compare(const Expr& a, const Expr& b);
bool structurally_equal(const Expr& a, const Expr& b);

/// Canonical form: constants folded, 0/1 identities removed, Neg/Sub erased,
/// sums and products flattened with like terms/factors merged and children
/// sorted under compare(). Idempotent and value-preserving.
Expr simplify(const Expr& e);

/// Symbolic d/dx_i, returned canonically simplified.
Expr derivative(const Expr& e, int var_index);

/// IEEE-double evaluation. Throws EvalError on division by zero, naming the
/// offending subexpression.
double eval(const Expr& e, std::span<const double> x);

std::string to_string(const Expr& e);

/// Grammar: see docs/grammar.md. Variables are x1..x<dimension>; `^` takes a
/// nonnegative integer literal; sin/cos/exp are the recognized functions.
Expr parse_expression(std::string_view source, int dimension);

/// A scalar-valued function of the state, with its declared dimension.
struct ScalarField {
  int dim = 0;
  Expr body;
};

ScalarField parse(std::string_view source, int dimension);
double evaluate(const ScalarField& f, std::span<const double> x);
ScalarField partial(const ScalarField& f, int var_index);
std::string to_string(const ScalarField& f);

}  // namespace liestab
