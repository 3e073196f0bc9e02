#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "liestab/expr.hpp"

namespace liestab {

/// Flat postorder program for fast repeated evaluation of one expression.
/// Tree-walking the Expr is fine for one-off queries; integrators and grid
/// scans evaluate the same field millions of times, so they run this instead.
class CompiledField {
 public:
  CompiledField() = default;
  static CompiledField compile(const ScalarField& f);

  double eval(std::span<const double> x, std::vector<double>& stack) const;
  double eval(std::span<const double> x) const {
    std::vector<double> stack;
    return eval(x, stack);
  }

  int dim() const { return dim_; }

 private:
  enum class Op : std::uint8_t { Const, Var, Neg, Sin, Cos, Exp, Add, Sub, Mul, Div, Pow };
  struct Instr {
    Op op;
    int arg = 0;     // Var: 0-based index; Pow: exponent
    double c = 0.0;  // Const
  };
  std::vector<Instr> code_;
  int dim_ = 0;
  std::size_t stack_need_ = 1;

  void emit(const Expr& e);
};

struct CompiledVectorField {
  int dim = 0;
  std::vector<CompiledField> comp;

  void eval(std::span<const double> x, std::span<double> out, std::vector<double>& stack) const {
    for (std::size_t i = 0; i < comp.size(); ++i) out[i] = comp[i].eval(x, stack);
  }
};

}  // namespace liestab
