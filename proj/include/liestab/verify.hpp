#pragma once

#include "liestab/classify.hpp"

namespace liestab {

/// One identity check: engine value vs independently built closed-form
/// template, max |difference| over the sampled points.
struct IdentityCheck {
  std::string name;
  double max_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RegressionReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
};

/// Regression of the symbolic Lie engine against hand-built closed forms for
/// the chain-power family: gV, [f,g] and ([f,g]V) at random points, and the
/// k-fold g-brackets (k = 2..L) on the slice x3 = 0, where their closed forms
/// have no residual terms. The templates are assembled from a, b and their
/// x3-derivatives with plain expression arithmetic, never through the bracket
/// engine, so the two routes are independent.
RegressionReport bracket_regression(int L, const std::string& a_source,
                                    const std::string& b_source, int n_points,
                                    std::uint64_t seed, double tolerance = 1e-8,
                                    BracketConvention conv = BracketConvention::Standard);

}  // namespace liestab
