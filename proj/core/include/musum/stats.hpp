#pragma once

#include <vector>

namespace musum {

struct SignificanceResult {
  double statistic = 0.0; // W = min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0; // two-sided
  int n_effective = 0;  // pairs with nonzero difference
  bool exact = false;   // full sign enumeration vs normal approximation
};

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped; tied |d| get average ranks. Exact two-sided p by full sign
/// enumeration for n_effective <= 25, otherwise a tie-corrected normal
/// approximation with continuity correction.
SignificanceResult wilcoxon_signed_rank(const std::vector<double>& a,
                                        const std::vector<double>& b);

} // namespace musum
