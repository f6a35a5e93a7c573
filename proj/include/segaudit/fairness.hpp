#ifndef SEGAUDIT_FAIRNESS_HPP
#define SEGAUDIT_FAIRNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "segaudit/cohort.hpp"

namespace segaudit {

enum class Orientation { HigherBetter, LowerBetter };
const char* to_string(Orientation o);

// Binary "high performer" outcomes against a common top-quartile bar.
// higher-better: outcome = score >= Q3; lower-better: outcome = score <= Q1.
// Ties at the threshold are all included.
struct OutcomeTable {
  std::string metric;
  Orientation orientation = Orientation::HigherBetter;
  double threshold = 0.0;
  std::vector<int> outcome;
  std::vector<std::string> group;  // parallel to outcome
};

// Thresholds >= 4 finite scores with the shared linear-interpolation
// quantile. Returns outcomes in input order; group labels are attached by
// the caller.
OutcomeTable binarize_top_quartile(const std::vector<double>& scores,
                                   Orientation orientation);

// |P(y=1|A=a) - P(y=1|A=b)|.
double dpd(const OutcomeTable& outcomes, const std::string& a, const std::string& b);

// min(rate_a, rate_b) / max(rate_a, rate_b); empty when both rates are 0.
std::optional<double> dir(const OutcomeTable& outcomes, const std::string& a,
                          const std::string& b);

// max group mean - min group mean of the raw metric over finite values.
double fairness_gap(const AuditTable& table, const std::string& metric,
                    const std::string& attribute);

struct GroupStats {
  std::string group;
  std::size_t n = 0;
  double mean = 0.0, sd = 0.0, rate_high = 0.0;
  bool insufficient_n = false;  // below the minimum reporting size
};

struct FairnessPair {
  std::string group_a, group_b;
  double dpd = 0.0;
  std::optional<double> dir;
};

struct FairnessResult {
  std::string metric, attribute;
  Orientation orientation = Orientation::HigherBetter;
  double threshold = 0.0;
  std::size_t n_included = 0, n_excluded = 0;
  std::vector<GroupStats> groups;    // lexicographic by group
  std::vector<FairnessPair> pairs;   // lexicographic by (a, b)
  std::optional<FairnessPair> worst_dpd_pair;  // max DPD among eligible pairs
  std::optional<FairnessPair> worst_dir_pair;  // min DIR among eligible pairs
  double gap = 0.0;
  std::string gap_high_group, gap_low_group;
};

// Assembles binarization (threshold over the full included population),
// pairwise DPD/DIR, worst pair, fairness gap, and group summaries. Groups
// smaller than min_group_size are flagged and excluded from worst-pair
// selection. Rows with non-finite metric values are excluded and counted.
FairnessResult fairness_summary(const AuditTable& table, const std::string& metric,
                                const std::string& attribute, Orientation orientation,
                                std::size_t min_group_size = 5);

}  // namespace segaudit

#endif
