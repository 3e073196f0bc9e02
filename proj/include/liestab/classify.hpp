#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "liestab/system.hpp"

namespace liestab {

/// Which stabilizability certificate holds at a point. GNonzero means the
/// control direction already moves V ((gV)(x) != 0); ArtsteinSontag means the
/// drift alone decreases V where gV vanishes; P1..P4 are the four Nth-order
/// certificates over iterated brackets; Unclassified means nothing matched up
/// to the configured order cap.
enum class ConditionTag { GNonzero, ArtsteinSontag, P1, P2, P3, P4, Unclassified };

std::string tag_name(ConditionTag tag);

struct Classification {
  ConditionTag tag = ConditionTag::Unclassified;
  int witness_order = 0;  // N; 0 for GNonzero / ArtsteinSontag
  std::vector<std::pair<std::string, double>> diagnostics;

  double diagnostic(const std::string& name) const;
};

struct CheckResult {
  bool holds = false;
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// Outcome of the third-order bracket span test at a point: the 3x3 matrix
/// [g | [f,g] | [f,[f,g]]] has full rank, DV(x) != 0, and where gV vanishes
/// the drift derivatives either decrease V or vanish through order 3.
struct SpanTestResult {
  bool holds = false;
  bool span_full = false;
  bool gradient_nonzero = false;
  bool lyapunov_implication = false;
  double det = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// Axis-aligned lattice with a punctured ball around the origin.
struct GridSpec {
  std::vector<double> lo, hi;
  double step = 0.25;
  double exclude_radius = 1e-6;

  std::vector<std::vector<double>> points() const;
};

struct PointResult {
  std::vector<double> x;
  Classification cls;
  std::string error;  // nonempty when classification itself failed
};

struct ScanReport {
  GridSpec grid;
  std::vector<PointResult> points;
  std::map<std::string, int> counts;
  std::vector<std::size_t> unclassified;
  std::vector<std::size_t> errors;
};

/// Point classifier with per-system symbolic caches. Classification of a
/// point is a pure function of (system, x); the caches memoize realized
/// bracket and product fields, which depend on the system alone. Cached
/// state is published as immutable snapshots, so points may be classified
/// concurrently.
class Classifier {
 public:
  explicit Classifier(System sys, BracketConvention conv = BracketConvention::Standard);

  const System& system() const { return sys_; }

  /// True iff (gV)(x) and every operator product of Hall words (bare g
  /// excluded) with total order <= N vanish at x within eps(x). This set of
  /// conditions is monotone in N.
  CheckResult check_vanishing(std::span<const double> x, int N) const;

  Classification classify_point(std::span<const double> x) const;

  /// classify_point with an explicit zero tolerance instead of eps(x). Used
  /// by the synthesizer to identify the bracket stratum a point is adjacent
  /// to when its own gV value is nonzero but too weak to act on.
  Classification classify_point_relaxed(std::span<const double> x, double eps) const;

  ScanReport scan_region(const GridSpec& grid) const;

  SpanTestResult span_test(std::span<const double> x) const;

  /// Realized certificate fields, exposed for regression tests.
  ScalarField gV() const;
  ScalarField f_power_V(int i) const;     // (f^i V), i >= 1
  ScalarField adg_bracket_V(int N) const;  // ([[..[f,g],..,g] with N g's) V
  ScalarField adf_bracket_V(int N) const;  // ([[..[g,f],..,f] with N f's) V

  /// Fast pointwise certificate values (cached compiled fields).
  double eval_adg_V(int N, std::span<const double> x) const;
  double eval_adf_V(int N, std::span<const double> x) const;
  double eval_f_power_V(int i, std::span<const double> x) const;

  /// Number of distinct nonzero product fields of total order exactly m.
  std::size_t product_count(int m) const;

 private:
  struct ProductEntry {
    std::string label;
    ScalarField field;
    CompiledField compiled;
  };
  struct Snapshot {
    int built = 0;
    std::vector<ScalarField> f_pow_V;  // f^i V at index i-1, sized built+1
    std::vector<CompiledField> c_f_pow_V;
    std::vector<ScalarField> adg_V, adf_V;  // index N-1
    std::vector<CompiledField> c_adg_V, c_adf_V;
    std::vector<std::vector<ProductEntry>> products;  // index m-1
  };
  struct SpanFields {
    VectorField fg, ffg;
    std::vector<ScalarField> gradV;
    std::vector<CompiledField> c_f123;  // fV, f^2V, f^3V
  };

  std::shared_ptr<const Snapshot> with_order(int N) const;
  std::shared_ptr<const SpanFields> span_fields() const;
  CheckResult check_vanishing_in(const Snapshot& snap, std::span<const double> x, int N,
                                 double eps) const;
  Classification classify_impl(std::span<const double> x, double eps) const;

  System sys_;
  BracketConvention conv_;
  ScalarField gV_, fV_;
  CompiledField c_gV_, c_fV_;
  std::vector<BracketWord> hall_;  // bare g excluded
  mutable std::shared_ptr<const Snapshot> snap_;
  mutable std::shared_ptr<const SpanFields> span_;
  mutable std::mutex mu_;
};

}  // namespace liestab
