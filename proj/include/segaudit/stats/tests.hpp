#ifndef SEGAUDIT_STATS_TESTS_HPP
#define SEGAUDIT_STATS_TESTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace segaudit::stats {

struct TestResult {
  std::string method;  // shapiro_wilk | kruskal_wallis | mann_whitney_u | chi_square | anova_f
  double statistic = 0.0;
  std::vector<double> df;  // zero, one, or two entries depending on method
  double p_value = 1.0;
  std::vector<std::string> flags;  // "degenerate", "small_n", "exact", ...

  bool has_flag(const std::string& f) const {
    for (const auto& x : flags)
      if (x == f) return true;
    return false;
  }
};

// Midranks of the pooled sample, in input order. Ties share their average rank.
std::vector<double> midranks(const std::vector<double>& pooled);

// Kruskal-Wallis H with tie correction; p from the chi-square tail with
// k-1 df. Total n < 5 sets the "small_n" flag; all-tied data degenerates to
// p = 1 with the "degenerate" flag.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Two-sided Mann-Whitney U. Exact enumeration (count distribution) when
// n_x * n_y <= 400 and the pooled data is tie-free; otherwise the normal
// approximation with tie-corrected variance and 0.5 continuity correction.
// The reported statistic is U for the first sample.
TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

// p_adj = min(1, m * p).
std::vector<double> bonferroni(const std::vector<double>& pvals);

// Chi-square independence test on an r x c count table. Cells with expected
// count < 5 are reported via an "expected_lt_5:<count>" flag.
TestResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& table);

// Shapiro-Wilk W, 3 <= n <= 5000, with the Royston (1995) AS R94 p-value
// approximation. Samples above 5000 are deterministically subsampled (seeded
// shuffle, first 5000) and flagged "subsampled".
TestResult shapiro_wilk(const std::vector<double>& x, std::uint64_t subsample_seed = 0);

}  // namespace segaudit::stats

#endif
