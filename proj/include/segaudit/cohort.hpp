#ifndef SEGAUDIT_COHORT_HPP
#define SEGAUDIT_COHORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segaudit/seg_metrics.hpp"

namespace segaudit {

// Young < 40, 40 <= Middle <= 55, Older > 55.
enum class AgeGroup { Young, Middle, Older };

const char* to_string(AgeGroup g);
AgeGroup bin_age(double age_years);  // errors outside (0, 120)

inline constexpr const char* kRatingLevels[4] = {"Good", "Acceptable", "Poor", "Missed"};
bool is_valid_rating(const std::string& r);

struct CaseRecord {
  std::string case_id;
  double age_years = 0.0;
  std::string ethnicity;
  std::string data_source;
  std::optional<std::string> expert_rating;
};

// Validated, id-keyed collection of case records.
class Cohort {
 public:
  static Cohort from_records(std::vector<CaseRecord> records);
  // CSV with columns case_id,age_years,ethnicity,data_source[,expert_rating].
  static Cohort from_csv(const std::string& text);
  static Cohort from_csv_file(const std::string& path);

  const std::vector<CaseRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<CaseRecord> records_;  // sorted by case_id
};

struct AuditRow {
  CaseRecord record;
  AgeGroup age_group = AgeGroup::Young;
  double dice = 0.0;
  std::optional<double> hd95_mm;
};

struct JoinReport {
  std::vector<std::string> cohort_only;   // ids with no metrics row
  std::vector<std::string> metrics_only;  // ids with no cohort record
};

// The analysis table: one row per case with demographics, age bin, and
// metrics. Rows with undefined HD95 stay in the table (they are excluded
// only from HD95-based analyses downstream).
class AuditTable {
 public:
  static AuditTable from_rows(std::vector<AuditRow> rows);
  // Inner join on case_id; unmatched ids on both sides reported, empty
  // result is an error.
  static AuditTable join_metrics(const Cohort& cohort,
                                 const std::vector<CaseMetrics>& metrics,
                                 JoinReport* report = nullptr);
  static AuditTable from_csv(const std::string& text);
  static AuditTable from_csv_file(const std::string& path);

  const std::vector<AuditRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  // Column accessors by name. Numeric: age_years, dice, hd95_mm (NaN where
  // undefined). Categorical: age_group, ethnicity, data_source,
  // expert_rating (empty string where absent).
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> categorical_column(const std::string& name) const;
  bool has_ratings() const;

  std::string to_csv() const;

 private:
  std::vector<AuditRow> rows_;  // sorted by case_id
};

// Downsamples every level of `attribute` to the smallest level's count,
// without replacement, by partial Fisher-Yates over lexicographically sorted
// ids. Reproducible for a given seed. Output size = min_count * level_count.
AuditTable balance_cohort(const AuditTable& table, const std::string& attribute,
                          std::uint64_t seed);

// Sampling core shared with the CLI path: picks per-level id subsets.
std::vector<std::string> balanced_id_sample(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& ids_by_level,
    std::uint64_t seed);

}  // namespace segaudit

#endif
