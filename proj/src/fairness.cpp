#include "segaudit/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "segaudit/common.hpp"
#include "segaudit/quantile.hpp"

namespace segaudit {

const char* to_string(Orientation o) {
  return o == Orientation::HigherBetter ? "higher_better" : "lower_better";
}

OutcomeTable binarize_top_quartile(const std::vector<double>& scores,
                                   Orientation orientation) {
  if (scores.size() < 4)
    throw ValidationError("binarize_top_quartile: need >= 4 scores");
  for (double s : scores)
    if (!std::isfinite(s))
      throw ValidationError("binarize_top_quartile: non-finite score");

  OutcomeTable out;
  out.orientation = orientation;
  if (orientation == Orientation::HigherBetter) {
    out.threshold = quantile(scores, 0.75);
    for (double s : scores) out.outcome.push_back(s >= out.threshold ? 1 : 0);
  } else {
    out.threshold = quantile(scores, 0.25);
    for (double s : scores) out.outcome.push_back(s <= out.threshold ? 1 : 0);
  }
  return out;
}

namespace {

double group_rate(const OutcomeTable& t, const std::string& g) {
  std::size_t n = 0, hits = 0;
  for (std::size_t i = 0; i < t.outcome.size(); ++i)
    if (t.group[i] == g) {
      ++n;
      hits += t.outcome[i];
    }
  if (n == 0) throw ValidationError("empty group: " + g);
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

double dpd(const OutcomeTable& outcomes, const std::string& a, const std::string& b) {
  return std::fabs(group_rate(outcomes, a) - group_rate(outcomes, b));
}

std::optional<double> dir(const OutcomeTable& outcomes, const std::string& a,
                          const std::string& b) {
  const double ra = group_rate(outcomes, a);
  const double rb = group_rate(outcomes, b);
  const double hi = std::max(ra, rb);
  if (hi == 0.0) return std::nullopt;
  return std::min(ra, rb) / hi;
}

double fairness_gap(const AuditTable& table, const std::string& metric,
                    const std::string& attribute) {
  const auto values = table.numeric_column(metric);
  const auto groups = table.categorical_column(attribute);
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i])) {
      acc[groups[i]].first += values[i];
      acc[groups[i]].second += 1;
    }
  if (acc.size() < 2)
    throw ValidationError("fairness_gap: need >= 2 non-empty groups");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [g, sum_n] : acc) {
    const double mean = sum_n.first / static_cast<double>(sum_n.second);
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  return hi - lo;
}

FairnessResult fairness_summary(const AuditTable& table, const std::string& metric,
                                const std::string& attribute, Orientation orientation,
                                std::size_t min_group_size) {
  const auto all_values = table.numeric_column(metric);
  const auto all_groups = table.categorical_column(attribute);

  std::vector<double> values;
  std::vector<std::string> groups;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < all_values.size(); ++i) {
    if (std::isfinite(all_values[i])) {
      values.push_back(all_values[i]);
      groups.push_back(all_groups[i]);
    } else {
      ++excluded;
    }
  }

  FairnessResult res;
  res.metric = metric;
  res.attribute = attribute;
  res.orientation = orientation;
  res.n_included = values.size();
  res.n_excluded = excluded;

  // Population-level threshold: group rates are compared against one
  // common bar, never per-group bars.
  OutcomeTable outcomes = binarize_top_quartile(values, orientation);
  outcomes.metric = metric;
  outcomes.group = groups;
  res.threshold = outcomes.threshold;

  std::map<std::string, std::vector<double>> by_group;
  std::map<std::string, std::size_t> hits;
  for (std::size_t i = 0; i < values.size(); ++i) {
    by_group[groups[i]].push_back(values[i]);
    hits[groups[i]] += outcomes.outcome[i];
  }
  if (by_group.size() < 2)
    throw ValidationError("fairness_summary: need >= 2 non-empty groups");

  double lo_mean = std::numeric_limits<double>::infinity();
  double hi_mean = -std::numeric_limits<double>::infinity();
  for (const auto& [g, vals] : by_group) {
    GroupStats gs;
    gs.group = g;
    gs.n = vals.size();
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    gs.mean = mean;
    gs.sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
    gs.rate_high = static_cast<double>(hits[g]) / static_cast<double>(vals.size());
    gs.insufficient_n = vals.size() < min_group_size;
    res.groups.push_back(std::move(gs));
    if (mean < lo_mean) {
      lo_mean = mean;
      res.gap_low_group = g;
    }
    if (mean > hi_mean) {
      hi_mean = mean;
      res.gap_high_group = g;
    }
  }
  res.gap = hi_mean - lo_mean;

  for (std::size_t i = 0; i < res.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < res.groups.size(); ++j) {
      const auto& ga = res.groups[i];
      const auto& gb = res.groups[j];
      FairnessPair pair;
      pair.group_a = ga.group;
      pair.group_b = gb.group;
      pair.dpd = std::fabs(ga.rate_high - gb.rate_high);
      const double hi = std::max(ga.rate_high, gb.rate_high);
      if (hi > 0.0) pair.dir = std::min(ga.rate_high, gb.rate_high) / hi;
      res.pairs.push_back(pair);
      if (ga.insufficient_n || gb.insufficient_n) continue;
      if (!res.worst_dpd_pair || pair.dpd > res.worst_dpd_pair->dpd)
        res.worst_dpd_pair = pair;
      if (pair.dir && (!res.worst_dir_pair || *pair.dir < *res.worst_dir_pair->dir))
        res.worst_dir_pair = pair;
    }
  }
  return res;
}

}  // namespace segaudit
