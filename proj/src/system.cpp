#include "liestab/system.hpp"

namespace liestab {

System System::make(VectorField f, VectorField g, ScalarField V, double eps_scale, int n_max) {
  if (f.dim != g.dim || f.dim != V.dim)
    throw DimensionError("system components disagree on dimension");
  if (eps_scale <= 0) throw PreconditionError("eps_scale must be positive");
  if (n_max < 1) throw PreconditionError("n_max must be >= 1");
  System s;
  s.f_ = std::move(f);
  s.g_ = std::move(g);
  s.V_ = std::move(V);
  s.V_.body = simplify(s.V_.body);
  for (auto& c : s.f_.comp) c = simplify(c);
  for (auto& c : s.g_.comp) c = simplify(c);
  s.eps_scale_ = eps_scale;
  s.n_max_ = n_max;
  auto b = std::make_shared<Bundle>();
  b->f.dim = s.f_.dim;
  b->g.dim = s.g_.dim;
  for (const auto& c : s.f_.comp) b->f.comp.push_back(CompiledField::compile({s.f_.dim, c}));
  for (const auto& c : s.g_.comp) b->g.comp.push_back(CompiledField::compile({s.g_.dim, c}));
  b->V = CompiledField::compile(s.V_);
  s.bundle_ = std::move(b);
  return s;
}

System chain_power_system(int L, const Expr& a, const Expr& b, double eps_scale, int n_max) {
  if (L < 3 || L % 2 == 0)
    throw PreconditionError("L must be an odd integer >= 3, got " + std::to_string(L));
  const int n = 3;
  VectorField f;
  f.dim = n;
  f.comp = {simplify(a * pow(var(3), L)), simplify(b * var(3)), constant(0.0)};
  VectorField g;
  g.dim = n;
  g.comp = {constant(0.0), constant(0.0), constant(1.0)};
  ScalarField V{n, simplify(constant(0.5) * pow(var(1), 2) +
                            constant(1.0 / (L + 1)) * pow(var(2), L + 1) +
                            constant(0.5) * pow(var(3), 2))};
  return System::make(std::move(f), std::move(g), std::move(V), eps_scale, n_max);
}

System chain_power_system(int L, const std::string& a, const std::string& b, double eps_scale,
                          int n_max) {
  return chain_power_system(L, parse(a, 3).body, parse(b, 3).body, eps_scale, n_max);
}

void validate_system(const System& sys, std::uint64_t seed) {
  std::vector<double> origin(static_cast<std::size_t>(sys.dim()), 0.0);
  double v0 = sys.v_at(origin);
  if (std::abs(v0) > sys.eps_scale())
    throw PreconditionError("V(0) = " + std::to_string(v0) + ", expected 0");
  auto f0 = eval_field(sys.f(), origin);
  if (norm2(f0) > sys.eps_at(origin))
    throw PreconditionError("f(0) != 0 (|f(0)| = " + std::to_string(norm2(f0)) + ")");
  Rng rng(seed);
  for (int trial = 0; trial < 64; ++trial) {
    auto x = rng.on_sphere(sys.dim(), rng.uniform(0.1, 2.0));
    if (sys.v_at(x) <= 0.0)
      throw PreconditionError("V is not positive at a sampled nonzero point");
  }
}

}  // namespace liestab
