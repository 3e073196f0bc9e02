#include "liestab/classify.hpp"

#include <algorithm>
#include <cmath>

namespace liestab {

std::string tag_name(ConditionTag tag) {
  switch (tag) {
    case ConditionTag::GNonzero: return "g_nonzero";
    case ConditionTag::ArtsteinSontag: return "artstein_sontag";
    case ConditionTag::P1: return "p1";
    case ConditionTag::P2: return "p2";
    case ConditionTag::P3: return "p3";
    case ConditionTag::P4: return "p4";
    case ConditionTag::Unclassified: return "unclassified";
  }
  return "?";
}

double Classification::diagnostic(const std::string& name) const {
  for (const auto& [k, v] : diagnostics)
    if (k == name) return v;
  throw Error("no diagnostic named " + name);
}

std::vector<std::vector<double>> GridSpec::points() const {
  if (lo.size() != hi.size()) throw DimensionError("grid lo/hi dimension mismatch");
  if (step <= 0) throw PreconditionError("grid step must be positive");
  std::size_t n = lo.size();
  std::vector<std::vector<double>> pts;
  if (n == 0) return pts;
  std::vector<std::size_t> counts(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (hi[d] < lo[d]) throw PreconditionError("grid hi < lo");
    counts[d] = static_cast<std::size_t>(std::floor((hi[d] - lo[d]) / step + 1.5));
  }
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < n; ++d) x[d] = lo[d] + static_cast<double>(idx[d]) * step;
    if (norm2(x) >= exclude_radius) pts.push_back(std::move(x));
    std::size_t d = n;
    for (;;) {
      if (d == 0) return pts;
      --d;
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
    }
  }
}

Classifier::Classifier(System sys, BracketConvention conv) : sys_(std::move(sys)), conv_(conv) {
  gV_ = directional_derivative(sys_.g(), sys_.V());
  fV_ = directional_derivative(sys_.f(), sys_.V());
  c_gV_ = CompiledField::compile(gV_);
  c_fV_ = CompiledField::compile(fV_);
  // Hall words with the bare generator g excluded: these are the admissible
  // product factors for the vanishing conditions.
  for (const auto& w : hall_basis(sys_.n_max()))
    if (!(w.is_leaf() && w.is_g())) hall_.push_back(w);
}

/// Extends the published snapshot to cover orders <= N: f^i V up to i = N+1,
/// the two iterated-bracket certificate fields, and all operator-product
/// fields of total order <= N. Builds are serialized; readers keep whatever
/// snapshot they already hold.
std::shared_ptr<const Classifier::Snapshot> Classifier::with_order(int N) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (snap_ && snap_->built >= N) return snap_;
  auto next = snap_ ? std::make_shared<Snapshot>(*snap_) : std::make_shared<Snapshot>();
  if (next->f_pow_V.empty()) {
    next->f_pow_V.push_back(fV_);
    next->c_f_pow_V.push_back(c_fV_);
  }
  for (int m = next->built + 1; m <= N; ++m) {
    while (static_cast<int>(next->f_pow_V.size()) < m + 1) {
      ScalarField nf = directional_derivative(sys_.f(), next->f_pow_V.back());
      next->c_f_pow_V.push_back(CompiledField::compile(nf));
      next->f_pow_V.push_back(std::move(nf));
    }
    ScalarField adg = directional_derivative(iterated_bracket(sys_.f(), sys_.g(), m, conv_), sys_.V());
    next->c_adg_V.push_back(CompiledField::compile(adg));
    next->adg_V.push_back(std::move(adg));
    ScalarField adf = directional_derivative(iterated_bracket(sys_.g(), sys_.f(), m, conv_), sys_.V());
    next->c_adf_V.push_back(CompiledField::compile(adf));
    next->adf_V.push_back(std::move(adf));

    // Operator products of total order m: a word of order k extends every
    // product of total order m-k (those fields are exactly the suffix
    // products). Literal-zero fields are dropped; duplicates by canonical
    // form are evaluated once.
    std::vector<ProductEntry> entries;
    std::vector<std::string> seen;
    auto add_entry = [&](std::string label, ScalarField field) {
      if (field.body.is_constant(0.0)) return;
      std::string canon = to_string(field.body);
      if (std::find(seen.begin(), seen.end(), canon) != seen.end()) return;
      seen.push_back(std::move(canon));
      CompiledField c = CompiledField::compile(field);
      entries.push_back({std::move(label), std::move(field), std::move(c)});
    };
    for (const auto& w : hall_) {
      if (w.order() > m) break;
      VectorField Xw = realize(w, sys_.f(), sys_.g(), conv_);
      if (is_zero_field(Xw)) continue;
      if (w.order() == m) {
        add_entry(w.str(), directional_derivative(Xw, sys_.V()));
      } else {
        for (const auto& suffix : next->products[static_cast<std::size_t>(m - w.order() - 1)])
          add_entry(w.str() + "," + suffix.label, directional_derivative(Xw, suffix.field));
      }
    }
    next->products.push_back(std::move(entries));
    next->built = m;
  }
  snap_ = next;
  return next;
}

CheckResult Classifier::check_vanishing_in(const Snapshot& snap, std::span<const double> x, int N,
                                           double eps) const {
  CheckResult res;
  res.holds = true;
  std::vector<double> stack;
  double gv = c_gV_.eval(x, stack);
  res.diagnostics.emplace_back("gV", gv);
  if (std::abs(gv) > eps) res.holds = false;
  for (int m = 1; m <= N && res.holds; ++m) {
    double worst = 0.0;
    std::string worst_label = "-";
    for (const auto& entry : snap.products[static_cast<std::size_t>(m - 1)]) {
      double v = entry.compiled.eval(x, stack);
      if (std::abs(v) > std::abs(worst)) {
        worst = v;
        worst_label = entry.label;
      }
      if (std::abs(v) > eps) {
        res.holds = false;
        res.diagnostics.emplace_back("violating(" + entry.label + ")V", v);
        break;
      }
    }
    res.diagnostics.emplace_back("max|order " + std::to_string(m) + "|(" + worst_label + ")", worst);
  }
  return res;
}

CheckResult Classifier::check_vanishing(std::span<const double> x, int N) const {
  if (norm2(x) == 0.0) throw PreconditionError("check_vanishing requires x != 0");
  if (N < 1 || N > sys_.n_max())
    throw PreconditionError("N must be in [1, n_max=" + std::to_string(sys_.n_max()) + "]");
  auto snap = with_order(N);
  return check_vanishing_in(*snap, x, N, sys_.eps_at(x));
}

Classification Classifier::classify_point(std::span<const double> x) const {
  if (norm2(x) == 0.0) throw PreconditionError("classify_point requires x != 0");
  return classify_impl(x, sys_.eps_at(x));
}

Classification Classifier::classify_point_relaxed(std::span<const double> x, double eps) const {
  if (norm2(x) == 0.0) throw PreconditionError("classify_point requires x != 0");
  if (!(eps > 0.0)) throw PreconditionError("relaxed tolerance must be positive");
  return classify_impl(x, eps);
}

Classification Classifier::classify_impl(std::span<const double> x, double eps) const {
  Classification out;
  std::vector<double> stack;
  double gv = c_gV_.eval(x, stack);
  double fv = c_fV_.eval(x, stack);
  out.diagnostics.emplace_back("gV", gv);
  out.diagnostics.emplace_back("fV", fv);
  if (std::abs(gv) > eps) {
    out.tag = ConditionTag::GNonzero;
    return out;
  }
  if (fv < -eps) {
    out.tag = ConditionTag::ArtsteinSontag;
    return out;
  }
  for (int N = 1; N <= sys_.n_max(); ++N) {
    auto snap = with_order(N);
    CheckResult chk = check_vanishing_in(*snap, x, N, eps);
    if (!chk.holds) break;  // the vanishing set only grows with N
    double f_next = snap->c_f_pow_V[static_cast<std::size_t>(N)].eval(x, stack);
    double adg = snap->c_adg_V[static_cast<std::size_t>(N - 1)].eval(x, stack);
    double adf = snap->c_adf_V[static_cast<std::size_t>(N - 1)].eval(x, stack);
    auto certify = [&](ConditionTag tag, const std::string& name, double value) {
      out.tag = tag;
      out.witness_order = N;
      for (const auto& kv : chk.diagnostics)
        if (kv.first != "gV") out.diagnostics.push_back(kv);
      out.diagnostics.emplace_back("f^" + std::to_string(N + 1) + "V", f_next);
      out.diagnostics.emplace_back(name, value);
    };
    if (f_next < -eps) {
      certify(ConditionTag::P1, "certificate(f^" + std::to_string(N + 1) + "V)", f_next);
      return out;
    }
    if (N % 2 == 1 && std::abs(adg) > eps) {
      certify(ConditionTag::P2, "certificate(adg^" + std::to_string(N) + "V)", adg);
      return out;
    }
    if (N % 2 == 0 && adg < -eps) {
      certify(ConditionTag::P3, "certificate(adg^" + std::to_string(N) + "V)", adg);
      return out;
    }
    if (std::abs(f_next) <= eps && std::abs(adf) > eps) {
      certify(ConditionTag::P4, "certificate(adf^" + std::to_string(N) + "V)", adf);
      return out;
    }
  }
  out.tag = ConditionTag::Unclassified;
  return out;
}

ScanReport Classifier::scan_region(const GridSpec& grid) const {
  ScanReport report;
  report.grid = grid;
  auto pts = grid.points();
  report.points.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    PointResult& r = report.points[i];
    r.x = pts[i];
    try {
      r.cls = classify_point(r.x);
    } catch (const Error& e) {
      r.error = e.what();
    }
  });
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const auto& r = report.points[i];
    if (!r.error.empty()) {
      report.errors.push_back(i);
      ++report.counts["error"];
      continue;
    }
    ++report.counts[tag_name(r.cls.tag)];
    if (r.cls.tag == ConditionTag::Unclassified) report.unclassified.push_back(i);
  }
  return report;
}

std::shared_ptr<const Classifier::SpanFields> Classifier::span_fields() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (span_) return span_;
  auto sf = std::make_shared<SpanFields>();
  sf->fg = lie_bracket(sys_.f(), sys_.g(), conv_);
  sf->ffg = lie_bracket(sys_.f(), sf->fg, conv_);
  for (int i = 1; i <= sys_.dim(); ++i) sf->gradV.push_back(partial(sys_.V(), i));
  ScalarField fp = fV_;
  sf->c_f123.push_back(CompiledField::compile(fp));
  for (int i = 2; i <= 3; ++i) {
    fp = directional_derivative(sys_.f(), fp);
    sf->c_f123.push_back(CompiledField::compile(fp));
  }
  span_ = sf;
  return span_;
}

SpanTestResult Classifier::span_test(std::span<const double> x) const {
  if (sys_.dim() != 3) throw DimensionError("span test is defined for three-dimensional systems");
  if (norm2(x) == 0.0) throw PreconditionError("span test requires x != 0");
  auto sf = span_fields();
  double eps = sys_.eps_at(x);
  SpanTestResult res;
  auto cg = eval_field(sys_.g(), x);
  auto cfg = eval_field(sf->fg, x);
  auto cffg = eval_field(sf->ffg, x);
  res.det = cg[0] * (cfg[1] * cffg[2] - cfg[2] * cffg[1]) -
            cfg[0] * (cg[1] * cffg[2] - cg[2] * cffg[1]) +
            cffg[0] * (cg[1] * cfg[2] - cg[2] * cfg[1]);
  res.span_full = std::abs(res.det) > eps;
  std::vector<double> grad(3);
  for (std::size_t i = 0; i < 3; ++i) grad[i] = evaluate(sf->gradV[i], x);
  res.gradient_nonzero = norm2(grad) > eps;
  std::vector<double> stack;
  double gv = c_gV_.eval(x, stack);
  double f1 = sf->c_f123[0].eval(x, stack);
  double f2 = sf->c_f123[1].eval(x, stack);
  double f3 = sf->c_f123[2].eval(x, stack);
  if (std::abs(gv) > eps) {
    res.lyapunov_implication = true;
  } else {
    res.lyapunov_implication =
        (f1 < -eps) || (std::abs(f1) <= eps && std::abs(f2) <= eps && std::abs(f3) <= eps);
  }
  res.holds = res.span_full && res.gradient_nonzero && res.lyapunov_implication;
  res.diagnostics = {{"det", res.det}, {"|DV|", norm2(grad)}, {"gV", gv},
                     {"fV", f1},       {"f^2V", f2},          {"f^3V", f3}};
  return res;
}

ScalarField Classifier::gV() const { return gV_; }

ScalarField Classifier::f_power_V(int i) const {
  if (i < 1) throw PreconditionError("f_power_V requires i >= 1");
  if (i == 1) return fV_;
  auto snap = with_order(std::min(sys_.n_max(), i - 1));
  if (static_cast<int>(snap->f_pow_V.size()) >= i)
    return snap->f_pow_V[static_cast<std::size_t>(i - 1)];
  // Beyond the order cap: extend locally without touching the cache.
  ScalarField fp = snap->f_pow_V.back();
  for (int k = static_cast<int>(snap->f_pow_V.size()); k < i; ++k)
    fp = directional_derivative(sys_.f(), fp);
  return fp;
}

ScalarField Classifier::adg_bracket_V(int N) const {
  if (N < 1 || N > sys_.n_max()) throw PreconditionError("adg_bracket_V: N out of range");
  return with_order(N)->adg_V[static_cast<std::size_t>(N - 1)];
}

ScalarField Classifier::adf_bracket_V(int N) const {
  if (N < 1 || N > sys_.n_max()) throw PreconditionError("adf_bracket_V: N out of range");
  return with_order(N)->adf_V[static_cast<std::size_t>(N - 1)];
}

double Classifier::eval_adg_V(int N, std::span<const double> x) const {
  if (N < 1 || N > sys_.n_max()) throw PreconditionError("eval_adg_V: N out of range");
  std::vector<double> stack;
  return with_order(N)->c_adg_V[static_cast<std::size_t>(N - 1)].eval(x, stack);
}

double Classifier::eval_adf_V(int N, std::span<const double> x) const {
  if (N < 1 || N > sys_.n_max()) throw PreconditionError("eval_adf_V: N out of range");
  std::vector<double> stack;
  return with_order(N)->c_adf_V[static_cast<std::size_t>(N - 1)].eval(x, stack);
}

double Classifier::eval_f_power_V(int i, std::span<const double> x) const {
  if (i < 1 || i > sys_.n_max() + 1) throw PreconditionError("eval_f_power_V: i out of range");
  std::vector<double> stack;
  auto snap = with_order(std::max(1, i - 1));
  return snap->c_f_pow_V[static_cast<std::size_t>(i - 1)].eval(x, stack);
}

std::size_t Classifier::product_count(int m) const {
  if (m < 1 || m > sys_.n_max()) throw PreconditionError("product_count: order out of range");
  return with_order(m)->products[static_cast<std::size_t>(m - 1)].size();
}

}  // namespace liestab
