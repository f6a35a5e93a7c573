#ifndef SEGAUDIT_AUDIT_HPP
#define SEGAUDIT_AUDIT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segaudit/cohort.hpp"
#include "segaudit/fairness.hpp"
#include "segaudit/stats/regression.hpp"
#include "segaudit/stats/tests.hpp"

namespace segaudit {

struct AuditConfig {
  std::vector<std::string> metrics = {"dice", "hd95_mm"};
  std::vector<std::string> attributes = {"age_group", "ethnicity"};
  std::string source_column = "data_source";
  double alpha = 0.05;
  std::map<std::string, Orientation> orientation = {
      {"dice", Orientation::HigherBetter}, {"hd95_mm", Orientation::LowerBetter}};
  std::size_t min_group_size = 5;    // below: flagged, excluded from worst pair
  std::size_t min_source_cases = 20; // below: source skipped in disaggregation
  std::uint64_t seed = 0;            // subsampling only; the audit draws nothing else

  void validate() const;
  static AuditConfig from_json_text(const std::string& text);
  static AuditConfig from_json_file(const std::string& path);
};

struct PosthocRow {
  std::string group_a, group_b;
  double u_stat = 0.0;
  double p_raw = 1.0;
  double p_bonferroni = 1.0;
  bool significant = false;
};

// All unordered pairs (lexicographic), Mann-Whitney U each, Bonferroni over
// the number of pairs.
std::vector<PosthocRow> posthoc_pairs(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups, double alpha);

// One (metric, attribute) cell: omnibus test, gated post-hocs, fairness.
struct MetricAttributeBlock {
  stats::TestResult kruskal_wallis;
  std::optional<std::vector<PosthocRow>> posthoc;  // only when KW p < alpha
  FairnessResult fairness;
};

struct RegressionBlock {
  stats::RegressionResult baseline;   // metric ~ attribute
  stats::RegressionResult adjusted;   // metric ~ attribute + source
  std::optional<stats::RegressionResult> interaction;  // + attribute:source
  stats::TestResult anova_source;     // baseline vs adjusted
  std::optional<stats::TestResult> anova_interaction;  // adjusted vs interaction
  stats::EtaSquared eta;              // attribute effect, source-adjusted
};

struct SourceBlock {
  std::size_t n_cases = 0;
  // metric -> attribute -> cell
  std::map<std::string, std::map<std::string, MetricAttributeBlock>> cells;
};

struct RatingsBlock {
  stats::TestResult chi_square;
  std::vector<std::string> rating_levels;
  std::vector<std::string> attribute_levels;
  std::vector<std::vector<std::int64_t>> counts;  // rating x attribute level
};

struct ExclusionEntry {
  std::string analysis;
  std::string reason;
  std::size_t count = 0;
};

struct PerCaseScore {
  std::string case_id;
  std::string metric;
  double value = 0.0;
  std::string age_group, ethnicity, data_source;
};

struct AuditReport {
  AuditConfig config;
  std::size_t n_rows = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> included;  // metric -> (in, out)
  std::map<std::string, stats::TestResult> normality;                   // metric
  std::map<std::string, std::map<std::string, MetricAttributeBlock>> cells;
  std::map<std::string, std::map<std::string, std::optional<RegressionBlock>>> regressions;
  std::map<std::string, SourceBlock> by_source;
  std::map<std::string, RatingsBlock> ratings;  // attribute -> block
  std::vector<ExclusionEntry> exclusions;
  std::vector<PerCaseScore> per_case;  // included (finite) scores only

  std::string to_json_text() const;      // canonical: stable key order
  std::string to_markdown() const;
};

// Runs the full pipeline: normality, per-(metric, attribute) omnibus tests
// with gated post-hocs, fairness summaries, the three-model regression block
// with nested ANOVAs and eta-squared attenuation, per-source disaggregation,
// and expert-rating chi-square tests. Everything that cannot run lands in
// the exclusion ledger with a reason.
AuditReport run_audit(const AuditTable& table, const AuditConfig& config);

enum class ReportFormat { Json, Markdown, CsvBundle };

// Writes audit.json / audit.md / tables/*.csv under out_dir.
std::vector<std::string> render_report(const AuditReport& report, ReportFormat format,
                                       const std::string& out_dir);

}  // namespace segaudit

#endif
