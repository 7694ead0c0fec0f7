#include "musum/stats.hpp"

#include "musum/common.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace musum {

namespace {

constexpr int kExactLimit = 25;

// Counts sign assignments with W+ <= lo or W+ >= hi over all 2^n of them,
// visiting assignments in Gray-code order so each step flips one rank.
double exact_two_sided_p(const std::vector<double>& ranks, double w_min) {
  const int n = static_cast<int>(ranks.size());
  double total_rank = 0.0;
  for (double r : ranks) total_rank += r;
  const double lo = w_min + 1e-9;
  const double hi = total_rank - w_min - 1e-9;

  std::uint64_t count = 0;
  double w_plus = 0.0; // start at the all-negative assignment
  if (w_plus <= lo || w_plus >= hi) ++count;
  const std::uint64_t combos = std::uint64_t{1} << n;
  std::uint64_t code = 0;
  for (std::uint64_t g = 1; g < combos; ++g) {
    const int flip = std::countr_zero(g);
    const std::uint64_t bit = std::uint64_t{1} << flip;
    code ^= bit;
    w_plus += (code & bit) ? ranks[static_cast<size_t>(flip)] : -ranks[static_cast<size_t>(flip)];
    if (w_plus <= lo || w_plus >= hi) ++count;
  }
  return std::min(1.0, static_cast<double>(count) / static_cast<double>(combos));
}

} // namespace

SignificanceResult wilcoxon_signed_rank(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Config, "wilcoxon: samples must pair up");
  if (a.size() < 5) fail(ErrorKind::Config, "wilcoxon: need at least 5 pairs");

  std::vector<double> diffs;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }

  SignificanceResult res;
  res.n_effective = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    res.exact = true;
    return res; // all pairs tie: W = 0, p = 1
  }

  std::vector<size_t> order(diffs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

  // Average ranks within ties; remember tie-group sizes for the variance
  // correction.
  std::vector<double> ranks(diffs.size(), 0.0);
  std::vector<int> tie_sizes;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
    tie_sizes.push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }

  for (size_t k = 0; k < diffs.size(); ++k)
    (diffs[k] > 0.0 ? res.w_plus : res.w_minus) += ranks[k];
  res.statistic = std::min(res.w_plus, res.w_minus);

  const int n = res.n_effective;
  if (n <= kExactLimit) {
    res.exact = true;
    res.p_value = exact_two_sided_p(ranks, res.statistic);
  } else {
    const double mu = n * (n + 1) / 4.0;
    double var = n * (n + 1) * (2.0 * n + 1.0) / 24.0;
    for (int t : tie_sizes) var -= (static_cast<double>(t) * t * t - t) / 48.0;
    if (var <= 0.0) {
      res.p_value = 1.0;
    } else {
      // Continuity correction: W moves in discrete steps, so pull the
      // deviation half a step toward the mean before comparing to a density.
      const double dev = std::max(0.0, std::abs(res.w_plus - mu) - 0.5);
      const double z = dev / std::sqrt(var);
      res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
  }
  return res;
}

} // namespace musum
