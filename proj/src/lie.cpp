#include "liestab/lie.hpp"

#include <algorithm>

namespace liestab {

namespace {

void check_limit(const Expr& e, std::size_t limit) {
  if (node_count(e) > limit)
    throw ExpressionTooLarge("expression too large: node count exceeds " + std::to_string(limit));
}

void check_same_dim(const VectorField& X, const VectorField& Y) {
  if (X.dim != Y.dim)
    throw DimensionError("vector field dimensions differ: " + std::to_string(X.dim) + " vs " +
                         std::to_string(Y.dim));
}

}  // namespace

VectorField make_vector_field(int dim, const std::vector<std::string>& sources) {
  if (static_cast<int>(sources.size()) != dim)
    throw DimensionError("expected " + std::to_string(dim) + " components, got " +
                         std::to_string(sources.size()));
  VectorField X;
  X.dim = dim;
  X.comp.reserve(sources.size());
  for (const auto& s : sources) X.comp.push_back(parse(s, dim).body);
  return X;
}

VectorField zero_field(int dim) {
  VectorField X;
  X.dim = dim;
  X.comp.assign(static_cast<std::size_t>(dim), constant(0.0));
  return X;
}

bool is_zero_field(const VectorField& X) {
  return std::all_of(X.comp.begin(), X.comp.end(), [](const Expr& e) { return e.is_constant(0.0); });
}

std::vector<double> eval_field(const VectorField& X, std::span<const double> x) {
  std::vector<double> out;
  out.reserve(X.comp.size());
  for (const Expr& e : X.comp) out.push_back(eval(e, x));
  return out;
}

ScalarField directional_derivative(const VectorField& X, const ScalarField& V,
                                   std::size_t node_limit) {
  if (X.dim != V.dim)
    throw DimensionError("field dimension " + std::to_string(X.dim) +
                         " does not match scalar dimension " + std::to_string(V.dim));
  std::vector<Expr> terms;
  terms.reserve(X.comp.size());
  for (int i = 0; i < X.dim; ++i) terms.push_back(X.comp[static_cast<std::size_t>(i)] * derivative(V.body, i + 1));
  Expr out = simplify(sum(std::move(terms)));
  check_limit(out, node_limit);
  return ScalarField{V.dim, out};
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y, BracketConvention conv,
                        std::size_t node_limit) {
  check_same_dim(X, Y);
  VectorField out;
  out.dim = X.dim;
  out.comp.reserve(static_cast<std::size_t>(X.dim));
  for (int j = 0; j < X.dim; ++j) {
    // [X,Y]_j = X(Y_j) - Y(X_j), i.e. ((DY)X - (DX)Y)_j.
    Expr forward = directional_derivative(X, ScalarField{X.dim, Y.comp[static_cast<std::size_t>(j)]}, node_limit).body;
    Expr reverse = directional_derivative(Y, ScalarField{X.dim, X.comp[static_cast<std::size_t>(j)]}, node_limit).body;
    Expr c = conv == BracketConvention::Standard ? simplify(forward - reverse) : simplify(reverse - forward);
    check_limit(c, node_limit);
    out.comp.push_back(std::move(c));
  }
  return out;
}

VectorField iterated_bracket(const VectorField& base, const VectorField& arm, int k,
                             BracketConvention conv, std::size_t node_limit) {
  if (k < 1) throw PreconditionError("iterated_bracket requires k >= 1");
  VectorField acc = lie_bracket(base, arm, conv, node_limit);
  for (int i = 1; i < k; ++i) acc = lie_bracket(acc, arm, conv, node_limit);
  return acc;
}

BracketWord BracketWord::F() {
  BracketWord w;
  auto n = std::make_shared<Node>();
  n->leaf = 1;
  w.node_ = std::move(n);
  return w;
}

BracketWord BracketWord::G() {
  BracketWord w;
  auto n = std::make_shared<Node>();
  n->leaf = 2;
  w.node_ = std::move(n);
  return w;
}

BracketWord BracketWord::pair(BracketWord left, BracketWord right) {
  BracketWord w;
  auto n = std::make_shared<Node>();
  n->leaf = 0;
  n->order = left.order() + right.order();
  n->kids = {std::move(left), std::move(right)};
  w.node_ = std::move(n);
  return w;
}

std::string BracketWord::str() const {
  if (is_leaf()) return is_f() ? "f" : "g";
  return "[" + left().str() + "," + right().str() + "]";
}

int compare(const BracketWord& a, const BracketWord& b) {
  if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
  if (a.is_leaf() && b.is_leaf()) {
    int la = a.is_f() ? 0 : 1, lb = b.is_f() ? 0 : 1;
    return la == lb ? 0 : (la < lb ? -1 : 1);
  }
  if (a.is_leaf() != b.is_leaf()) return a.is_leaf() ? -1 : 1;
  int c = compare(a.left(), b.left());
  if (c != 0) return c;
  return compare(a.right(), b.right());
}

std::vector<BracketWord> hall_basis(int max_order) {
  if (max_order < 1) throw PreconditionError("hall_basis requires max_order >= 1");
  std::vector<std::vector<BracketWord>> by_order(static_cast<std::size_t>(max_order) + 1);
  by_order[1] = {BracketWord::F(), BracketWord::G()};
  for (int m = 2; m <= max_order; ++m) {
    std::vector<BracketWord> words;
    for (int a = 1; a < m; ++a) {
      int b = m - a;
      for (const BracketWord& u : by_order[static_cast<std::size_t>(a)]) {
        for (const BracketWord& v : by_order[static_cast<std::size_t>(b)]) {
          if (compare(u, v) >= 0) continue;
          if (!v.is_leaf() && compare(v.left(), u) > 0) continue;
          words.push_back(BracketWord::pair(u, v));
        }
      }
    }
    std::sort(words.begin(), words.end(),
              [](const BracketWord& x, const BracketWord& y) { return compare(x, y) < 0; });
    by_order[static_cast<std::size_t>(m)] = std::move(words);
  }
  std::vector<BracketWord> all;
  for (int m = 1; m <= max_order; ++m)
    all.insert(all.end(), by_order[static_cast<std::size_t>(m)].begin(), by_order[static_cast<std::size_t>(m)].end());
  return all;
}

VectorField realize(const BracketWord& w, const VectorField& f, const VectorField& g,
                    BracketConvention conv, std::size_t node_limit) {
  check_same_dim(f, g);
  if (w.is_leaf()) return w.is_f() ? f : g;
  return lie_bracket(realize(w.left(), f, g, conv, node_limit),
                     realize(w.right(), f, g, conv, node_limit), conv, node_limit);
}

int OperatorProduct::total_order() const {
  int s = 0;
  for (const auto& w : factors) s += w.order();
  return s;
}

std::string OperatorProduct::str() const {
  std::string s;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) s += ",";
    s += factors[i].str();
  }
  return s;
}

ScalarField apply_product(const OperatorProduct& prod, const VectorField& f, const VectorField& g,
                          const ScalarField& V, BracketConvention conv, std::size_t node_limit) {
  if (prod.factors.empty()) throw PreconditionError("operator product must be nonempty");
  ScalarField acc = V;
  for (auto it = prod.factors.rbegin(); it != prod.factors.rend(); ++it)
    acc = directional_derivative(realize(*it, f, g, conv, node_limit), acc, node_limit);
  return acc;
}

}  // namespace liestab
