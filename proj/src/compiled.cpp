#include "liestab/compiled.hpp"

#include <cmath>

namespace liestab {

CompiledField CompiledField::compile(const ScalarField& f) {
  CompiledField out;
  out.dim_ = f.dim;
  out.emit(f.body);
  // Worst-case stack depth: every instruction pushes before ops pop.
  out.stack_need_ = out.code_.size() + 1;
  return out;
}

void CompiledField::emit(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
      code_.push_back({Op::Const, 0, e.constant_value()});
      return;
    case ExprKind::Variable:
      code_.push_back({Op::Var, e.var_index() - 1, 0.0});
      return;
    case ExprKind::Neg:
      emit(e.children()[0]);
      code_.push_back({Op::Neg, 0, 0.0});
      return;
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Exp:
      emit(e.children()[0]);
      code_.push_back({e.kind() == ExprKind::Sin  ? Op::Sin
                       : e.kind() == ExprKind::Cos ? Op::Cos
                                                   : Op::Exp,
                       0, 0.0});
      return;
    case ExprKind::Pow:
      emit(e.children()[0]);
      code_.push_back({Op::Pow, e.exponent(), 0.0});
      return;
    case ExprKind::Sub:
    case ExprKind::Div: {
      emit(e.children()[0]);
      emit(e.children()[1]);
      code_.push_back({e.kind() == ExprKind::Sub ? Op::Sub : Op::Div, 0, 0.0});
      return;
    }
    case ExprKind::Add:
    case ExprKind::Mul: {
      auto kids = e.children();
      emit(kids[0]);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        emit(kids[i]);
        code_.push_back({e.kind() == ExprKind::Add ? Op::Add : Op::Mul, 0, 0.0});
      }
      return;
    }
  }
}

double CompiledField::eval(std::span<const double> x, std::vector<double>& stack) const {
  if (stack.size() < stack_need_) stack.resize(stack_need_);
  double* sp = stack.data();
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
        sp[top++] = in.c;
        break;
      case Op::Var:
        sp[top++] = x[static_cast<std::size_t>(in.arg)];
        break;
      case Op::Neg:
        sp[top - 1] = -sp[top - 1];
        break;
      case Op::Sin:
        sp[top - 1] = std::sin(sp[top - 1]);
        break;
      case Op::Cos:
        sp[top - 1] = std::cos(sp[top - 1]);
        break;
      case Op::Exp:
        sp[top - 1] = std::exp(sp[top - 1]);
        break;
      case Op::Pow: {
        double b = sp[top - 1], r = 1.0;
        for (int k = in.arg; k > 0; k >>= 1, b *= b)
          if (k & 1) r *= b;
        sp[top - 1] = r;
        break;
      }
      case Op::Add:
        --top;
        sp[top - 1] += sp[top];
        break;
      case Op::Sub:
        --top;
        sp[top - 1] -= sp[top];
        break;
      case Op::Mul:
        --top;
        sp[top - 1] *= sp[top];
        break;
      case Op::Div: {
        --top;
        if (sp[top] == 0.0) throw EvalError("division by zero in compiled expression");
        sp[top - 1] /= sp[top];
        break;
      }
    }
  }
  return sp[0];
}

}  // namespace liestab
