#pragma once

#include <memory>
#include <string>
#include <vector>

#include "liestab/expr.hpp"

namespace liestab {

/// Default ceiling on symbolic tree size; iterated brackets are simplified at
/// every nesting level, and crossing this limit raises ExpressionTooLarge
/// instead of degrading silently.
inline constexpr std::size_t kDefaultNodeLimit = 100000;

struct VectorField {
  int dim = 0;
  std::vector<Expr> comp;
};

VectorField make_vector_field(int dim, const std::vector<std::string>& sources);
VectorField zero_field(int dim);
bool is_zero_field(const VectorField& X);
std::vector<double> eval_field(const VectorField& X, std::span<const double> x);

/// Bracket sign convention for [X,Y]. The default computes (DY)X - (DX)Y,
/// matching the directional-derivative composition below; Flipped negates it
/// and exists as a verification hook for the regression CLI.
enum class BracketConvention { Standard, Flipped };

/// XV = sum_i X_i dV/dx_i : derivative of V along the flow of X.
ScalarField directional_derivative(const VectorField& X, const ScalarField& V,
                                   std::size_t node_limit = kDefaultNodeLimit);

VectorField lie_bracket(const VectorField& X, const VectorField& Y,
                        BracketConvention conv = BracketConvention::Standard,
                        std::size_t node_limit = kDefaultNodeLimit);

/// k-fold right bracketing [[..[[base,arm],arm],..],arm].
VectorField iterated_bracket(const VectorField& base, const VectorField& arm, int k,
                             BracketConvention conv = BracketConvention::Standard,
                             std::size_t node_limit = kDefaultNodeLimit);

/// Formal bracket word over the two generators F and G. The order of a word
/// is its leaf count, which for pure words matches the grading of the free
/// Lie algebra on {F,G}.
class BracketWord {
 public:
  static BracketWord F();
  static BracketWord G();
  static BracketWord pair(BracketWord left, BracketWord right);

  bool is_leaf() const { return node_->leaf != 0; }
  bool is_f() const { return node_->leaf == 1; }
  bool is_g() const { return node_->leaf == 2; }
  const BracketWord& left() const { return node_->kids[0]; }
  const BracketWord& right() const { return node_->kids[1]; }
  int order() const { return node_->order; }

  std::string str() const;

 private:
  struct Node {
    int leaf = 0;  // 0 = pair, 1 = F, 2 = G
    int order = 1;
    std::vector<BracketWord> kids;
  };
  std::shared_ptr<const Node> node_;
};

/// Total order: by word order (leaf count) first, then structurally.
int compare(const BracketWord& a, const BracketWord& b);

/// Hall basis of the free Lie algebra on {F,G}, all words with order up to
/// max_order, in a deterministic order. [u,v] is admitted when u < v and
/// either v is a generator or the left part of v is <= u.
std::vector<BracketWord> hall_basis(int max_order);

/// Substitutes F -> f, G -> g and evaluates the bracket tree symbolically.
VectorField realize(const BracketWord& w, const VectorField& f, const VectorField& g,
                    BracketConvention conv = BracketConvention::Standard,
                    std::size_t node_limit = kDefaultNodeLimit);

/// Ordered composition of bracket words acting on a scalar field.
struct OperatorProduct {
  std::vector<BracketWord> factors;
  int total_order() const;
  std::string str() const;
};

/// (D1 D2 ... Dk V): the rightmost factor acts on V first, i.e. the result is
/// D1(D2(...(Dk V))) with each word acting as a directional derivative.
ScalarField apply_product(const OperatorProduct& prod, const VectorField& f, const VectorField& g,
                          const ScalarField& V,
                          BracketConvention conv = BracketConvention::Standard,
                          std::size_t node_limit = kDefaultNodeLimit);

}  // namespace liestab
