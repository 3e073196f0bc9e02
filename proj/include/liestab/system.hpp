#pragma once

#include <memory>

#include "liestab/compiled.hpp"
#include "liestab/lie.hpp"

namespace liestab {

/// An affine single-input system  dx/dt = f(x) + u g(x)  together with the
/// candidate Lyapunov function V. Construction compiles all fields once, so
/// System values are cheap to copy and safe to share across threads.
class System {
 public:
  System() = default;
  static System make(VectorField f, VectorField g, ScalarField V, double eps_scale = 1e-9,
                     int n_max = 7);

  int dim() const { return f_.dim; }
  const VectorField& f() const { return f_; }
  const VectorField& g() const { return g_; }
  const ScalarField& V() const { return V_; }
  double eps_scale() const { return eps_scale_; }
  int n_max() const { return n_max_; }

  /// Scale-aware zero tolerance used wherever an exact vanishing condition is
  /// tested numerically: eps(x) = eps_scale * (1 + |x|).
  double eps_at(std::span<const double> x) const { return eps_scale_ * (1.0 + norm2(x)); }

  const CompiledVectorField& cf() const { return bundle_->f; }
  const CompiledVectorField& cg() const { return bundle_->g; }
  double v_at(std::span<const double> x, std::vector<double>& stack) const {
    return bundle_->V.eval(x, stack);
  }
  double v_at(std::span<const double> x) const { return bundle_->V.eval(x); }

 private:
  struct Bundle {
    CompiledVectorField f, g;
    CompiledField V;
  };
  VectorField f_, g_;
  ScalarField V_;
  double eps_scale_ = 1e-9;
  int n_max_ = 7;
  std::shared_ptr<const Bundle> bundle_;
};

/// The three-dimensional family  dx1 = a(x) x3^L, dx2 = b(x) x3, dx3 = u
/// with V = x1^2/2 + x2^(L+1)/(L+1) + x3^2/2. L must be odd and >= 3.
System chain_power_system(int L, const Expr& a, const Expr& b, double eps_scale = 1e-9,
                          int n_max = 7);
System chain_power_system(int L, const std::string& a, const std::string& b,
                          double eps_scale = 1e-9, int n_max = 7);

/// Sampled sanity checks: V(0) = 0, V > 0 on a random sphere, f(0) = 0.
/// Throws PreconditionError with the failing quantity.
void validate_system(const System& sys, std::uint64_t seed = 17);

}  // namespace liestab
