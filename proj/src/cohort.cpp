#include "segaudit/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "segaudit/common.hpp"
#include "segaudit/csv.hpp"
#include "segaudit/numfmt.hpp"
#include "segaudit/rng.hpp"

namespace segaudit {

const char* to_string(AgeGroup g) {
  switch (g) {
    case AgeGroup::Young: return "Young";
    case AgeGroup::Middle: return "Middle";
    case AgeGroup::Older: return "Older";
  }
  return "?";
}

AgeGroup bin_age(double age_years) {
  if (!(age_years > 0.0 && age_years < 120.0))
    throw ValidationError("age out of range (0,120): " + format_double(age_years));
  if (age_years < 40.0) return AgeGroup::Young;
  if (age_years <= 55.0) return AgeGroup::Middle;
  return AgeGroup::Older;
}

bool is_valid_rating(const std::string& r) {
  for (const char* lvl : kRatingLevels)
    if (r == lvl) return true;
  return false;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

double parse_age(const std::string& s, const std::string& case_id) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("unparsable age '" + s + "' for case " + case_id);
  }
}

}  // namespace

Cohort Cohort::from_records(std::vector<CaseRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const CaseRecord& a, const CaseRecord& b) { return a.case_id < b.case_id; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.case_id.empty()) throw ValidationError("empty case_id");
    if (i > 0 && records[i - 1].case_id == r.case_id)
      throw ValidationError("duplicate case_id: " + r.case_id);
    if (!(r.age_years > 0.0 && r.age_years < 120.0))
      throw ValidationError("age out of range (0,120) for case " + r.case_id);
    if (r.expert_rating && !is_valid_rating(*r.expert_rating))
      throw ValidationError("invalid rating label '" + *r.expert_rating + "' for case " +
                            r.case_id);
  }
  Cohort c;
  c.records_ = std::move(records);
  return c;
}

Cohort Cohort::from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  for (const char* col : {"case_id", "age_years", "ethnicity", "data_source"})
    if (t.column(col) < 0)
      throw ValidationError(std::string("cohort csv: missing column ") + col);
  const int id_col = t.column("case_id");
  const int age_col = t.column("age_years");
  const int eth_col = t.column("ethnicity");
  const int src_col = t.column("data_source");
  const int rating_col = t.column("expert_rating");

  std::vector<CaseRecord> records;
  records.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    CaseRecord r;
    r.case_id = trim(row[id_col]);
    r.age_years = parse_age(trim(row[age_col]), r.case_id);
    r.ethnicity = trim(row[eth_col]);
    r.data_source = trim(row[src_col]);
    if (rating_col >= 0) {
      const std::string rating = trim(row[rating_col]);
      if (!rating.empty()) r.expert_rating = rating;
    }
    records.push_back(std::move(r));
  }
  return from_records(std::move(records));
}

Cohort Cohort::from_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cohort csv: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

AuditTable AuditTable::from_rows(std::vector<AuditRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const AuditRow& a, const AuditRow& b) {
    return a.record.case_id < b.record.case_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    if (i > 0 && rows[i - 1].record.case_id == r.record.case_id)
      throw ValidationError("duplicate case_id in table: " + r.record.case_id);
    r.age_group = bin_age(r.record.age_years);
    if (!(r.dice >= 0.0 && r.dice <= 1.0))
      throw ValidationError("dice out of [0,1] for case " + r.record.case_id);
    if (r.hd95_mm && !(*r.hd95_mm >= 0.0))
      throw ValidationError("negative hd95 for case " + r.record.case_id);
  }
  AuditTable t;
  t.rows_ = std::move(rows);
  return t;
}

AuditTable AuditTable::join_metrics(const Cohort& cohort,
                                    const std::vector<CaseMetrics>& metrics,
                                    JoinReport* report) {
  std::map<std::string, const CaseMetrics*> by_id;
  for (const auto& m : metrics) {
    if (!by_id.emplace(m.case_id, &m).second)
      throw ValidationError("duplicate case_id in metrics: " + m.case_id);
  }
  std::vector<AuditRow> rows;
  JoinReport rep;
  std::set<std::string> matched;
  for (const auto& rec : cohort.records()) {
    auto it = by_id.find(rec.case_id);
    if (it == by_id.end()) {
      rep.cohort_only.push_back(rec.case_id);
      continue;
    }
    matched.insert(rec.case_id);
    AuditRow row;
    row.record = rec;
    row.dice = it->second->dice;
    row.hd95_mm = it->second->hd95_mm;
    rows.push_back(std::move(row));
  }
  for (const auto& m : metrics)
    if (!matched.count(m.case_id)) rep.metrics_only.push_back(m.case_id);
  std::sort(rep.metrics_only.begin(), rep.metrics_only.end());
  if (rows.empty()) throw ValidationError("join produced no rows (no matching case ids)");
  if (report) *report = std::move(rep);
  return from_rows(std::move(rows));
}

std::vector<double> AuditTable::numeric_column(const std::string& name) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) {
    if (name == "age_years") out.push_back(r.record.age_years);
    else if (name == "dice") out.push_back(r.dice);
    else if (name == "hd95_mm")
      out.push_back(r.hd95_mm ? *r.hd95_mm : std::nan(""));
    else
      throw ValidationError("unknown numeric column: " + name);
  }
  return out;
}

std::vector<std::string> AuditTable::categorical_column(const std::string& name) const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) {
    if (name == "age_group") out.push_back(to_string(r.age_group));
    else if (name == "ethnicity") out.push_back(r.record.ethnicity);
    else if (name == "data_source") out.push_back(r.record.data_source);
    else if (name == "expert_rating")
      out.push_back(r.record.expert_rating.value_or(""));
    else
      throw ValidationError("unknown categorical column: " + name);
  }
  return out;
}

bool AuditTable::has_ratings() const {
  for (const auto& r : rows_)
    if (r.record.expert_rating) return true;
  return false;
}

std::string AuditTable::to_csv() const {
  CsvTable t;
  t.header = {"case_id", "age_years", "age_group",     "ethnicity",
              "data_source", "expert_rating", "dice", "hd95_mm"};
  for (const auto& r : rows_) {
    t.rows.push_back({r.record.case_id, format_double(r.record.age_years),
                      to_string(r.age_group), r.record.ethnicity, r.record.data_source,
                      r.record.expert_rating.value_or(""), format_double(r.dice),
                      r.hd95_mm ? format_double(*r.hd95_mm) : "NA"});
  }
  return format_csv(t);
}

AuditTable AuditTable::from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  const std::vector<std::string> expect = {"case_id", "age_years", "age_group",
                                           "ethnicity", "data_source", "expert_rating",
                                           "dice", "hd95_mm"};
  if (t.header != expect)
    throw ValidationError(
        "audit table csv header must be "
        "case_id,age_years,age_group,ethnicity,data_source,expert_rating,dice,hd95_mm");
  std::vector<AuditRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    AuditRow r;
    r.record.case_id = trim(row[0]);
    r.record.age_years = parse_age(trim(row[1]), r.record.case_id);
    r.record.ethnicity = trim(row[3]);
    r.record.data_source = trim(row[4]);
    const std::string rating = trim(row[5]);
    if (!rating.empty()) {
      if (!is_valid_rating(rating))
        throw ValidationError("invalid rating label '" + rating + "' for case " +
                              r.record.case_id);
      r.record.expert_rating = rating;
    }
    try {
      r.dice = std::stod(row[6]);
      if (row[7] != "NA") r.hd95_mm = std::stod(row[7]);
    } catch (const std::exception&) {
      throw ValidationError("unparsable metric for case " + r.record.case_id);
    }
    const std::string declared_group = trim(row[2]);
    if (declared_group != to_string(bin_age(r.record.age_years)))
      throw ValidationError("age_group '" + declared_group +
                            "' inconsistent with age_years for case " + r.record.case_id);
    rows.push_back(std::move(r));
  }
  return from_rows(std::move(rows));
}

AuditTable AuditTable::from_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audit table csv: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

std::vector<std::string> balanced_id_sample(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& ids_by_level,
    std::uint64_t seed) {
  if (ids_by_level.size() < 2)
    throw ValidationError("balance: attribute must have >= 2 levels");
  std::size_t min_count = SIZE_MAX;
  for (const auto& [level, ids] : ids_by_level) {
    if (ids.empty()) throw ValidationError("balance: level '" + level + "' has zero rows");
    min_count = std::min(min_count, ids.size());
  }
  Rng rng(seed);
  std::vector<std::string> selected;
  for (const auto& [level, ids_in] : ids_by_level) {
    std::vector<std::string> ids = ids_in;
    std::sort(ids.begin(), ids.end());
    // Partial Fisher-Yates: the first min_count slots become the sample.
    for (std::size_t i = 0; i < min_count; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.next_below(ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    selected.insert(selected.end(), ids.begin(), ids.begin() + min_count);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

AuditTable balance_cohort(const AuditTable& table, const std::string& attribute,
                          std::uint64_t seed) {
  const auto labels = table.categorical_column(attribute);
  std::map<std::string, std::vector<std::string>> by_level;
  for (std::size_t i = 0; i < table.rows().size(); ++i)
    by_level[labels[i]].push_back(table.rows()[i].record.case_id);

  std::vector<std::pair<std::string, std::vector<std::string>>> levels(
      by_level.begin(), by_level.end());
  const auto selected = balanced_id_sample(levels, seed);
  const std::set<std::string> keep(selected.begin(), selected.end());

  std::vector<AuditRow> rows;
  for (const auto& r : table.rows())
    if (keep.count(r.record.case_id)) rows.push_back(r);
  return AuditTable::from_rows(std::move(rows));
}

}  // namespace segaudit
