#include "liestab/verify.hpp"

#include <cmath>

namespace liestab {

bool RegressionReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

namespace {

double factorial_falling(int L, int k) {
  // L (L-1) ... (L-k+1)
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= static_cast<double>(L - i);
  return p;
}

}  // namespace

RegressionReport bracket_regression(int L, const std::string& a_source,
                                    const std::string& b_source, int n_points,
                                    std::uint64_t seed, double tolerance, BracketConvention conv) {
  System sys = chain_power_system(L, a_source, b_source);
  Expr a = parse(a_source, 3).body;
  Expr b = parse(b_source, 3).body;
  Expr pa3 = derivative(a, 3);
  Expr pb3 = derivative(b, 3);
  Expr x1 = var(1), x2 = var(2), x3 = var(3);

  // Closed-form templates, built with expression arithmetic only.
  Expr t_gV = x3;
  std::vector<Expr> t_fg = {
      simplify(neg(pa3 * pow(x3, L)) - constant(L) * a * pow(x3, L - 1)),
      simplify(neg(pb3 * x3) - b),
      constant(0.0),
  };
  Expr t_fgV = simplify(neg(pa3 * x1 * pow(x3, L)) - constant(L) * a * x1 * pow(x3, L - 1) -
                        pb3 * pow(x2, L) * x3 - b * pow(x2, L));

  // Engine route.
  ScalarField e_gV = directional_derivative(sys.g(), sys.V());
  VectorField e_fg = lie_bracket(sys.f(), sys.g(), conv);
  ScalarField e_fgV = directional_derivative(e_fg, sys.V());

  RegressionReport report;
  Rng rng(seed);
  auto sample = [&]() {
    std::vector<double> x(3);
    for (auto& c : x) c = rng.uniform(-2.0, 2.0);
    return x;
  };
  auto run_check = [&](const std::string& name, auto&& engine_fn, auto&& template_fn,
                       bool on_slice) {
    IdentityCheck chk;
    chk.name = name;
    chk.tolerance = tolerance;
    for (int p = 0; p < n_points; ++p) {
      auto x = sample();
      if (on_slice) x[2] = 0.0;
      double d = std::abs(engine_fn(x) - template_fn(x));
      chk.max_diff = std::max(chk.max_diff, d);
    }
    chk.pass = chk.max_diff <= tolerance;
    report.checks.push_back(std::move(chk));
  };

  run_check(
      "gV", [&](const std::vector<double>& x) { return evaluate(e_gV, x); },
      [&](const std::vector<double>& x) { return eval(t_gV, x); }, false);
  for (int c = 0; c < 3; ++c)
    run_check(
        "[f,g]_" + std::to_string(c + 1),
        [&](const std::vector<double>& x) { return eval(e_fg.comp[static_cast<std::size_t>(c)], x); },
        [&](const std::vector<double>& x) { return eval(t_fg[static_cast<std::size_t>(c)], x); },
        false);
  run_check(
      "[f,g]V", [&](const std::vector<double>& x) { return evaluate(e_fgV, x); },
      [&](const std::vector<double>& x) { return eval(t_fgV, x); }, false);

  // k-fold g-brackets on {x3 = 0}: first component is 0 for k < L and
  // -L! a(x1,x2,0) at k = L; second is (-1)^k k d^(k-1)b/dx3^(k-1); third 0.
  for (int k = 2; k <= L; ++k) {
    VectorField adk = iterated_bracket(sys.f(), sys.g(), k, conv);
    Expr dkb = b;
    for (int i = 0; i < k - 1; ++i) dkb = derivative(dkb, 3);
    double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
    double lead = factorial_falling(L, k);
    Expr t1 = (k == L) ? simplify(constant(sign_k * lead) * a) : constant(0.0);
    Expr t2 = simplify(constant(sign_k * k) * dkb);
    for (int c = 0; c < 3; ++c) {
      Expr tmpl = c == 0 ? t1 : (c == 1 ? t2 : constant(0.0));
      run_check(
          "adg^" + std::to_string(k) + "_" + std::to_string(c + 1),
          [&](const std::vector<double>& x) { return eval(adk.comp[static_cast<std::size_t>(c)], x); },
          [&](const std::vector<double>& x) { return eval(tmpl, x); }, true);
    }
    // The matching Lyapunov products on the slice.
    ScalarField adkV = directional_derivative(adk, sys.V());
    Expr tV = simplify(t1 * x1 + t2 * pow(x2, L));
    run_check(
        "adg^" + std::to_string(k) + "V",
        [&](const std::vector<double>& x) { return evaluate(adkV, x); },
        [&](const std::vector<double>& x) { return eval(tV, x); }, true);
  }
  return report;
}

}  // namespace liestab
