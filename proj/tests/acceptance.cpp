// Acceptance suite: every criterion runs at its stated tolerance and prints
// one PASS/FAIL line. The exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liestab/config.hpp"
#include "liestab/io.hpp"
#include "liestab/verify.hpp"
#include "support/oracles.hpp"

using namespace liestab;
using testing::witt_dimension;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

System chain3() { return chain_power_system(3, "1", "1"); }

// ---------------------------------------------------------------- criterion 1
Outcome criterion_bracket_regression() {
  Outcome out;
  for (auto [L, a, b] : std::vector<std::tuple<int, std::string, std::string>>{
           {3, "1", "1"}, {5, "1", "1"}, {3, "2 + sin(x1)", "1 + x2^2"}}) {
    RegressionReport rep = bracket_regression(L, a, b, 100, 20260809, 1e-8);
    double worst = 0.0;
    for (const auto& c : rep.checks) worst = std::max(worst, c.max_diff);
    out.require(rep.all_pass(), "mismatch for L=" + std::to_string(L) + ", a=" + a + ", b=" + b);
    if (rep.all_pass())
      out.note("L=" + std::to_string(L) + " worst diff " + std::to_string(worst));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_hall_witt() {
  Outcome out;
  auto words = hall_basis(8);
  std::vector<long> count(9, 0);
  for (const auto& w : words) ++count[static_cast<std::size_t>(w.order())];
  std::string sizes;
  for (int k = 1; k <= 8; ++k) {
    long expected = witt_dimension(2, k);
    out.require(count[static_cast<std::size_t>(k)] == expected,
                "order " + std::to_string(k) + ": got " + std::to_string(count[static_cast<std::size_t>(k)]) +
                    ", Witt " + std::to_string(expected));
    sizes += (k > 1 ? "," : "") + std::to_string(count[static_cast<std::size_t>(k)]);
  }
  out.note("sizes " + sizes);
  return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_stratification() {
  Outcome out;
  Classifier cls(chain3());
  GridSpec grid{{-1, -1, -1}, {1, 1, 1}, 0.25, 1e-6};
  ScanReport report = cls.scan_region(grid);
  out.require(report.errors.empty(), "errors during scan");
  out.require(report.unclassified.empty(),
              std::to_string(report.unclassified.size()) + " unclassified points");
  for (const auto& p : report.points) {
    double x2 = p.x[1], x3 = p.x[2];
    if (std::abs(x3) > 1e-9) {
      if (p.cls.tag != ConditionTag::GNonzero) {
        out.require(false, "off-slice point not g_nonzero");
        break;
      }
    } else if (std::abs(x2) > 1e-9) {
      if (p.cls.tag != ConditionTag::P2 || p.cls.witness_order != 1) {
        out.require(false, "x3=0,x2!=0 point not P2/N=1");
        break;
      }
    } else {
      if (p.cls.tag != ConditionTag::P2 || p.cls.witness_order != 3) {
        out.require(false, "axis point not P2/N=3");
        break;
      }
    }
  }
  out.note(std::to_string(report.points.size()) + " points");
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_vanishing_derivatives() {
  Outcome out;
  System sys = chain3();
  Classifier cls(sys);
  Rng rng(4404);
  const double h = 1e-4;
  const double mtol = 1e-13;  // flow tolerance for the stencil evaluations

  auto m = [&](std::span<const double> x0, double u1, double rho, double t) {
    return m_value(sys, x0, u1, rho, t, mtol);
  };

  for (int i = 0; i < 20 && out.pass; ++i) {  // first-order stratum
    std::vector<double> x0{rng.uniform(-1.5, 1.5),
                           (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.1, 1.5), 0.0};
    Classification c = cls.classify_point(x0);
    out.require(c.tag == ConditionTag::P2 && c.witness_order == 1, "case-1 point misclassified");
    if (!out.pass) break;
    SynthOutcome w = synth_two_phase(sys, x0, c, 0.25, SynthParams{});
    out.require(w.ok(), "no witness at case-1 point");
    if (!w.ok()) break;
    double u1 = w.witness->u1, rho = w.witness->rho;
    double m0 = m(x0, u1, rho, 0.0), mp = m(x0, u1, rho, h), mm = m(x0, u1, rho, -h);
    out.require(std::abs(mp - mm) <= 1e-6, "first difference " + std::to_string(mp - mm));
    out.require(mp - 2 * m0 + mm < 0.0, "second difference not negative");
  }

  for (int i = 0; i < 10 && out.pass; ++i) {  // third-order stratum
    std::vector<double> x0{(rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.2, 1.5), 0.0, 0.0};
    Classification c = cls.classify_point(x0);
    out.require(c.tag == ConditionTag::P2 && c.witness_order == 3, "case-2 point misclassified");
    if (!out.pass) break;
    SynthOutcome w = synth_two_phase(sys, x0, c, 0.25, SynthParams{});
    out.require(w.ok(), "no witness at case-2 point");
    if (!w.ok()) break;
    double u1 = w.witness->u1, rho = w.witness->rho;
    double m0 = m(x0, u1, rho, 0.0);
    double mp = m(x0, u1, rho, h), mm = m(x0, u1, rho, -h);
    double mp2 = m(x0, u1, rho, 2 * h), mm2 = m(x0, u1, rho, -2 * h);
    out.require(std::abs(mp - mm) <= 1e-6, "order-1 difference too large");
    out.require(std::abs(mp - 2 * m0 + mm) <= 1e-6, "order-2 difference too large");
    out.require(std::abs(mp2 - 2 * mp + 2 * mm - mm2) <= 1e-6, "order-3 difference too large");
    double h4 = 5e-4;
    double s4 = m(x0, u1, rho, 2 * h4) - 4 * m(x0, u1, rho, h4) + 6 * m0 -
                4 * m(x0, u1, rho, -h4) + m(x0, u1, rho, -2 * h4);
    out.require(s4 < 0.0, "fourth difference not negative");
  }
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_witness_suite() {
  Outcome out;
  Classifier cls(chain3());
  Rng rng(5505);
  int found = 0;
  for (int i = 0; i < 50; ++i) {
    auto x0 = rng.on_sphere(3, rng.uniform(0.1, 2.0));
    for (double cap : {0.25, 0.01}) {
      SynthOutcome w = synthesize(cls, x0, cap, SynthParams{});
      if (!w.ok()) {
        out.require(false, "no witness at run " + std::to_string(i) + " cap " + std::to_string(cap));
        continue;
      }
      ++found;
      out.require(w.witness->v_end < w.witness->v_start, "no decrease");
      out.require(w.witness->v_max_along <= 2.0 * w.witness->v_start + 1e-8,
                  "along-trajectory bound violated");
      out.require(w.witness->schedule.total_duration() <= cap + 1e-12, "cap exceeded");
    }
  }
  out.note(std::to_string(found) + "/100 witnesses");
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_closed_loop() {
  Outcome out;
  Classifier cls(chain3());
  Partition partition;  // uniform dt = 0.25
  ClosedLoopOptions opts;
  opts.horizon = 200.0;

  auto sample_ball = [](Rng& rng) {
    double r = 2.0 * std::cbrt(rng.uniform());
    return rng.on_sphere(3, r);
  };

  auto run_all = [&](std::uint64_t seed) {
    std::vector<SampledTrajectory> runs;
    Rng rng(seed);
    for (int i = 0; i < 50; ++i) {
      auto x0 = sample_ball(rng);
      runs.push_back(run_closed_loop(cls, x0, partition, SynthParams{}, opts));
    }
    return runs;
  };

  auto first = run_all(6606);
  int converged = 0, monotone = 0;
  double worst_radius = 0.0, best_radius = 1e9;
  for (const auto& traj : first) {
    if (traj.reason == Termination::Converged) ++converged;
    bool mono = true;
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
      if (!(traj.samples[i + 1].v < traj.samples[i].v)) mono = false;
    if (mono) ++monotone;
    double r = norm2(traj.samples.back().x);
    worst_radius = std::max(worst_radius, r);
    best_radius = std::min(best_radius, r);
  }
  out.require(converged == 50,
              std::to_string(converged) + "/50 runs reached |x| <= 1e-2 (final radii " +
                  std::to_string(best_radius) + ".." + std::to_string(worst_radius) + ")");
  out.require(monotone == 50, std::to_string(monotone) + "/50 runs V-monotone at samples");

  auto second = run_all(6606);
  bool identical = first.size() == second.size();
  const System& sys = cls.system();
  for (std::size_t i = 0; identical && i < first.size(); ++i)
    identical = sampled_trajectory_json(sys, first[i], false).dump() ==
                sampled_trajectory_json(sys, second[i], false).dump();
  out.require(identical, "re-run with the same seed not bit-identical");
  return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_stability_trend() {
  Outcome out;
  Classifier cls(chain3());
  Partition partition;
  ClosedLoopOptions opts;
  opts.horizon = 50.0;
  std::vector<double> radii{0.05, 0.1, 0.2, 0.5, 1.0};
  StabilityReport rep = stability_sweep(cls, radii, partition, 20, 7707, SynthParams{}, opts);
  std::string peaks;
  for (std::size_t i = 0; i < rep.bands.size(); ++i) {
    peaks += (i ? "," : "") + std::to_string(rep.bands[i].sup_peak);
    if (i > 0)
      out.require(rep.bands[i].sup_peak >= 0.9 * rep.bands[i - 1].sup_peak,
                  "sup-peak drops by more than the 10% slack at delta=" + std::to_string(radii[i]));
  }
  out.note("sup-peaks " + peaks);
  return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_negative_controls() {
  Outcome out;

  // a == 0: the first coordinate is uncontrollable; no convergence.
  System frozen = System::make(make_vector_field(3, {"0", "x3", "0"}),
                               make_vector_field(3, {"0", "0", "1"}),
                               parse("0.5*x1^2 + 0.25*x2^4 + 0.5*x3^2", 3));
  Classifier fcls(frozen);
  std::vector<double> x0{0.5, 0.3, 0.2};
  ClosedLoopOptions opts;
  opts.horizon = 10.0;
  SampledTrajectory traj = run_closed_loop(fcls, x0, Partition{}, SynthParams{}, opts);
  out.require(traj.reason != Termination::Converged && norm2(traj.samples.back().x) > 1e-2,
              "frozen-coordinate system converged");

  // Flipped bracket convention must fail the closed-form regression.
  RegressionReport flipped =
      bracket_regression(3, "1", "1", 100, 20260809, 1e-8, BracketConvention::Flipped);
  out.require(!flipped.all_pass(), "flipped bracket convention passed the regression");

  // Non-proper V produces unclassified points on the criterion-3 grid.
  System base = chain3();
  System broken = System::make(base.f(), base.g(), parse("0.5*x1^2", 3));
  Classifier bcls(broken);
  ScanReport rep = bcls.scan_region(GridSpec{{-1, -1, -1}, {1, 1, 1}, 0.25, 1e-6});
  out.require(!rep.unclassified.empty(), "non-proper V still classified everywhere");
  out.note(std::to_string(rep.unclassified.size()) + " unclassified with broken V");
  return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_property_suites() {
  Outcome out;
  System sys = chain3();
  Rng rng(9909);

  {  // antisymmetry of realized words, tolerance 1e-10
    auto words = hall_basis(3);
    for (const auto& A : words)
      for (const auto& B : words) {
        VectorField ab = realize(BracketWord::pair(A, B), sys.f(), sys.g());
        VectorField ba = realize(BracketWord::pair(B, A), sys.f(), sys.g());
        for (int p = 0; p < 4; ++p) {
          std::vector<double> x{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
          auto va = eval_field(ab, x);
          auto vb = eval_field(ba, x);
          for (std::size_t i = 0; i < 3; ++i)
            out.require(std::abs(va[i] + vb[i]) <= 1e-10, "antisymmetry");
        }
      }
  }
  {  // Jacobi, tolerance 1e-9
    VectorField X = sys.f(), Y = sys.g();
    VectorField Z = make_vector_field(3, {"sin(x2)", "x1*x3", "x1"});
    VectorField j1 = lie_bracket(X, lie_bracket(Y, Z));
    VectorField j2 = lie_bracket(Y, lie_bracket(Z, X));
    VectorField j3 = lie_bracket(Z, lie_bracket(X, Y));
    for (int p = 0; p < 100; ++p) {
      std::vector<double> x{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
      auto a = eval_field(j1, x), b = eval_field(j2, x), c = eval_field(j3, x);
      for (std::size_t i = 0; i < 3; ++i) out.require(std::abs(a[i] + b[i] + c[i]) <= 1e-9, "jacobi");
    }
  }
  {  // bracket/derivative link, tolerance 1e-9
    VectorField X = make_vector_field(3, {"x2^2", "cos(x1)", "x3"});
    VectorField Y = make_vector_field(3, {"x3", "x1", "0"});
    ScalarField V = sys.V();
    ScalarField lhs = directional_derivative(lie_bracket(X, Y), V);
    ScalarField xyv = directional_derivative(X, directional_derivative(Y, V));
    ScalarField yxv = directional_derivative(Y, directional_derivative(X, V));
    for (int p = 0; p < 100; ++p) {
      std::vector<double> x{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
      out.require(std::abs(evaluate(lhs, x) - (evaluate(xyv, x) - evaluate(yxv, x))) <= 1e-9,
                  "derivative link");
    }
  }
  {  // flow-commutator oracle, tolerance 10 t^3
    struct Case {
      VectorField X, Y;
      std::vector<double> x0;
    };
    std::vector<Case> cases;
    cases.push_back({make_vector_field(2, {"x2", "0"}), make_vector_field(2, {"0", "x1"}), {1.0, 1.0}});
    cases.push_back({sys.f(), sys.g(), {0.7, -0.4, 0.5}});
    for (const auto& c : cases) {
      System SX = testing::field_system(c.X);
      System SY = testing::field_system(c.Y);
      VectorField br = lie_bracket(c.X, c.Y);
      for (double t : {1e-2, 1e-3}) {
        auto moved = testing::flow_commutator(SX, SY, c.x0, t, 1e-13);
        auto bval = eval_field(br, c.x0);
        for (std::size_t i = 0; i < c.x0.size(); ++i)
          out.require(std::abs(moved[i] - c.x0[i] - t * t * bval[i]) <= 10.0 * t * t * t,
                      "flow commutator");
      }
    }
  }
  {  // integrator order: halving the fixed step gains a factor >= 8
    System decay = System::make(make_vector_field(1, {"-x1"}), make_vector_field(1, {"0"}),
                                parse("0.5*x1^2", 1));
    auto err = [&](double hstep) {
      std::vector<double> x{1.0};
      flow_affine(decay, x, 0.0, 1.0, IntegratorOptions{1e-6, hstep, 1000000});
      return std::abs(x[0] - std::exp(-1.0));
    };
    out.require(err(0.1) / err(0.05) >= 8.0, "integrator order");
  }
  {  // parser round trip, exact after canonicalization
    for (int i = 0; i < 1000; ++i) {
      Expr e = simplify(testing::random_expr(rng, 3, 3));
      Expr back = simplify(parse_expression(to_string(e), 3));
      out.require(structurally_equal(e, back), "round trip");
      if (!out.pass) break;
    }
  }
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  std::vector<Entry> criteria{
      {"1 bracket-identity regression", 10.0, criterion_bracket_regression},
      {"2 free-Lie-algebra sizes vs Witt oracle", 1.0, criterion_hall_witt},
      {"3 grid stratification", 60.0, criterion_stratification},
      {"4 vanishing derivatives of the composed flow", 60.0, criterion_vanishing_derivatives},
      {"5 decrease-witness suite", 120.0, criterion_witness_suite},
      {"6 sampled-data closed-loop convergence", 600.0, criterion_closed_loop},
      {"7 stability trend", 600.0, criterion_stability_trend},
      {"8 negative controls", 120.0, criterion_negative_controls},
      {"9 math-property suites", 60.0, criterion_property_suites},
  };
  int failures = 0;
  for (const auto& entry : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > entry.budget_s) {
      out.pass = false;
      out.note("runtime " + std::to_string(elapsed) + "s exceeds budget");
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL", entry.name, elapsed,
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
