#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "segaudit/audit.hpp"
#include "segaudit/seg_metrics.hpp"
#include "segaudit/synth.hpp"
#include "segaudit/common.hpp"
#include "segaudit/rng.hpp"

using namespace segaudit;
namespace fs = std::filesystem;

namespace {

// Hand-built table: two sources, three age groups, optional dice shift per
// age group, a few undefined HD95 rows, ratings derived from dice.
AuditTable synthetic_table(std::uint64_t seed, int n, double young_penalty) {
  Rng rng(seed);
  std::vector<AuditRow> rows;
  for (int i = 0; i < n; ++i) {
    AuditRow r;
    r.record.case_id = "case" + std::to_string(10000 + i);
    const int bucket = static_cast<int>(rng.next_below(3));
    r.record.age_years = bucket == 0 ? rng.uniform(25, 39) : bucket == 1
                          ? rng.uniform(40, 55) : rng.uniform(56, 80);
    r.record.ethnicity = rng.next_double() < 0.5 ? "e1" : "e2";
    r.record.data_source = rng.next_double() < 0.5 ? "sA" : "sB";
    double d = 0.75 + 0.2 * rng.next_double();
    if (bucket == 0) d -= young_penalty;
    r.dice = std::clamp(d, 0.0, 1.0);
    if (rng.next_double() > 0.05) r.hd95_mm = 1.0 + 3.0 * rng.next_double();
    r.record.expert_rating = r.dice >= 0.85 ? "Good" : r.dice >= 0.7 ? "Acceptable"
                                                                     : "Poor";
    rows.push_back(std::move(r));
  }
  return AuditTable::from_rows(std::move(rows));
}

}  // namespace

TEST_CASE("posthoc_pairs: three groups yield three rows with m=3 correction") {
  std::vector<std::pair<std::string, std::vector<double>>> groups = {
      {"a", {1, 2, 3, 4, 5}}, {"b", {2, 3, 4, 5, 6}}, {"c", {30, 31, 32, 33, 34}}};
  const auto rows = posthoc_pairs(groups, 0.05);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.p_bonferroni == doctest::Approx(std::min(1.0, 3.0 * r.p_raw)).epsilon(1e-12));
    CHECK(r.group_a < r.group_b);
  }
}

TEST_CASE("posthoc_pairs: identical groups are never significant") {
  const std::vector<double> same = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto rows = posthoc_pairs({{"a", same}, {"b", same}, {"c", same}}, 0.05);
  for (const auto& r : rows) CHECK_FALSE(r.significant);
}

TEST_CASE("posthoc_pairs: a +3SD-shifted group is flagged in exactly its two pairs") {
  int good = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(mix_seed(2468, s));
    std::vector<double> a(30), b(30), c(30);
    for (auto& v : a) v = rng.next_double();
    for (auto& v : b) v = rng.next_double();
    // shift +3 SD of U(0,1) ~ 3*0.2887
    for (auto& v : c) v = rng.next_double() + 3.0 * 0.2887;
    const auto rows = posthoc_pairs({{"a", a}, {"b", b}, {"c", c}}, 0.05);
    bool ok = true;
    for (const auto& r : rows) {
      const bool involves_c = r.group_a == "c" || r.group_b == "c";
      ok = ok && (r.significant == involves_c);
    }
    good += ok;
  }
  CHECK(static_cast<double>(good) / seeds >= 0.95);
}

TEST_CASE("run_audit produces a complete, consistent report") {
  const auto table = synthetic_table(31415, 240, 0.1);
  AuditConfig config;
  const auto report = run_audit(table, config);

  CHECK(report.n_rows == 240);
  CHECK(report.included.at("dice").first == 240);
  const auto hd_in = report.included.at("hd95_mm");
  CHECK(hd_in.first + hd_in.second == 240);
  CHECK(hd_in.second > 0);  // some undefined rows by construction

  // undefined rows land in the ledger
  bool ledgered = false;
  for (const auto& e : report.exclusions)
    ledgered = ledgered || (e.analysis == "metric:hd95_mm" && e.count == hd_in.second);
  CHECK(ledgered);

  // cells exist for both metrics and attributes
  CHECK(report.cells.at("dice").count("age_group") == 1);
  CHECK(report.cells.at("dice").count("ethnicity") == 1);
  CHECK(report.cells.at("hd95_mm").count("age_group") == 1);

  // gatekeeping: posthoc present iff omnibus KW is significant
  for (const auto& [metric, attrs] : report.cells)
    for (const auto& [attr, block] : attrs)
      CHECK(block.posthoc.has_value() ==
            (block.kruskal_wallis.p_value < config.alpha));

  // per-case conservation
  std::size_t expected = 0;
  for (const auto& [m, io] : report.included) expected += io.first;
  CHECK(report.per_case.size() == expected);

  // by-source case counts sum to the table size
  std::size_t by_source_total = 0;
  for (const auto& [s, sb] : report.by_source) by_source_total += sb.n_cases;
  CHECK(by_source_total == report.n_rows);

  // monotone consistency: the group with max mean in FairnessResult matches a
  // direct recomputation
  const auto& fr = report.cells.at("dice").at("age_group").fairness;
  double best_mean = -1;
  std::string best_group;
  for (const auto& g : fr.groups)
    if (g.mean > best_mean) {
      best_mean = g.mean;
      best_group = g.group;
    }
  CHECK(best_group == fr.gap_high_group);

  // regressions present for age_group and ethnicity
  CHECK(report.regressions.at("dice").at("age_group").has_value());
  const auto& rb = *report.regressions.at("dice").at("age_group");
  CHECK(rb.baseline.term_labels == std::vector<std::string>{"age_group"});
  CHECK(rb.adjusted.term_labels ==
        std::vector<std::string>{"age_group", "data_source"});
  CHECK(rb.interaction.has_value());
  CHECK(rb.anova_source.method == "anova_f");

  // ratings block exists for configured attributes
  CHECK(report.ratings.count("age_group") == 1);
  CHECK(report.ratings.count("ethnicity") == 1);
}

TEST_CASE("run_audit flags a clear age effect and its per-coefficient signal") {
  const auto table = synthetic_table(999, 400, 0.15);
  const auto report = run_audit(table, AuditConfig{});
  const auto& block = report.cells.at("dice").at("age_group");
  CHECK(block.kruskal_wallis.p_value < 0.05);
  REQUIRE(block.posthoc.has_value());

  const auto& rb = *report.regressions.at("dice").at("age_group");
  REQUIRE(rb.baseline.f_p_value.has_value());
  CHECK(*rb.baseline.f_p_value < 0.001);
  // Young dummy (reference is Middle, the most frequent-ish level) stays
  // significant in the adjusted model
  const auto* young = rb.adjusted.find("age_group[Young]");
  REQUIRE(young != nullptr);
  CHECK(young->p_value < 0.01);
  CHECK(young->beta < 0.0);
}

TEST_CASE("run_audit determinism: identical inputs, identical json bytes") {
  const auto table = synthetic_table(777, 150, 0.05);
  AuditConfig config;
  const auto a = run_audit(table, config).to_json_text();
  const auto b = run_audit(table, config).to_json_text();
  CHECK(a == b);
}

TEST_CASE("run_audit validates inputs") {
  const auto table = synthetic_table(5, 60, 0.0);
  AuditConfig config;
  config.alpha = 1.5;
  CHECK_THROWS_AS(run_audit(table, config), ValidationError);
  AuditConfig config2;
  config2.attributes = {"ghost_column"};
  CHECK_THROWS_AS(run_audit(table, config2), ValidationError);
  CHECK_THROWS_AS(run_audit(AuditTable::from_rows({}), AuditConfig{}), ValidationError);
}

TEST_CASE("sources below the minimum are skipped with a ledger entry") {
  auto rows = synthetic_table(808, 60, 0.0).rows();
  // add a 3-case source
  for (int i = 0; i < 3; ++i) {
    AuditRow r = rows[i];
    r.record.case_id = "tiny" + std::to_string(i);
    r.record.data_source = "sTiny";
    rows.push_back(r);
  }
  const auto table = AuditTable::from_rows(rows);
  const auto report = run_audit(table, AuditConfig{});
  CHECK(report.by_source.count("sTiny") == 0);
  bool ledgered = false;
  for (const auto& e : report.exclusions)
    ledgered = ledgered || (e.analysis == "by_source:sTiny" && e.count == 3);
  CHECK(ledgered);
}

TEST_CASE("markdown report carries the gap lines and headline tables") {
  const auto table = synthetic_table(31415, 240, 0.1);
  const auto report = run_audit(table, AuditConfig{});
  const auto md = report.to_markdown();

  // one gap=<x> (p=<y>) line per (metric, attribute) cell
  std::size_t gap_lines = 0;
  std::size_t pos = 0;
  while ((pos = md.find("\ngap=", pos)) != std::string::npos) {
    ++gap_lines;
    CHECK(md.find(" (p=", pos) == md.find(" (", pos));
    pos += 5;
  }
  std::size_t cells = 0;
  for (const auto& [m, attrs] : report.cells) cells += attrs.size();
  for (const auto& [s, sb] : report.by_source)
    for (const auto& [m, attrs] : sb.cells) cells += attrs.size();
  CHECK(gap_lines == cells);
  CHECK(md.find("| group | n | mean | sd | rate_high |") != std::string::npos);
  CHECK(md.find("Kruskal-Wallis") != std::string::npos);
}

TEST_CASE("render_report writes stable files and conserved csv row counts") {
  const auto dir = fs::temp_directory_path() / "segaudit_render_test";
  fs::remove_all(dir);
  const auto table = synthetic_table(161, 120, 0.08);
  const auto report = run_audit(table, AuditConfig{});

  render_report(report, ReportFormat::Json, dir.string());
  render_report(report, ReportFormat::Markdown, dir.string());
  render_report(report, ReportFormat::CsvBundle, dir.string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  const auto json1 = slurp(dir / "audit.json");
  render_report(report, ReportFormat::Json, dir.string());
  CHECK(json1 == slurp(dir / "audit.json"));

  const auto per_case = slurp(dir / "tables" / "per_case_scores.csv");
  const std::size_t lines = std::count(per_case.begin(), per_case.end(), '\n');
  std::size_t included_total = 0;
  for (const auto& [m, io] : report.included) included_total += io.first;
  CHECK(lines == included_total + 1);  // header

  CHECK(fs::exists(dir / "tables" / "group_summaries.csv"));
  CHECK(fs::exists(dir / "tables" / "fairness_pairs.csv"));
  CHECK(fs::exists(dir / "tables" / "regression_coefficients.csv"));
  const auto pairs_csv = slurp(dir / "tables" / "fairness_pairs.csv");
  CHECK(pairs_csv.rfind("metric,attribute,group_a,group_b,dpd,dir", 0) == 0);
  const auto summaries_csv = slurp(dir / "tables" / "group_summaries.csv");
  CHECK(summaries_csv.rfind("metric,attribute,group,n,mean,sd,rate_high", 0) == 0);
}

TEST_CASE("source-confounded scenario: source adjustment attenuates the HD95 effect") {
  // The generator's construction is the oracle: most of the ethnicity
  // effect on HD95 flows through the source, a smaller part is direct.
  const auto cfg = scenario_library("source_confounded_hd95");
  const auto plans = plan_assignments(cfg);
  std::vector<AuditRow> rows(cfg.n_cases);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cfg.n_cases); ++i) {
    const auto c = generate_case(cfg, plans[static_cast<std::size_t>(i)],
                                 static_cast<std::size_t>(i));
    AuditRow r;
    r.record = c.record;
    const auto m = compute_case_metrics(c.record.case_id, c.gold, c.silver);
    r.dice = m.dice;
    r.hd95_mm = m.hd95_mm;
    rows[static_cast<std::size_t>(i)] = std::move(r);
  }
  const auto table = AuditTable::from_rows(std::move(rows));
  const auto report = run_audit(table, AuditConfig{});
  const auto& rb = report.regressions.at("hd95_mm").at("ethnicity");
  REQUIRE(rb.has_value());
  REQUIRE(rb->eta.attenuation_pct.has_value());
  CHECK(*rb->eta.attenuation_pct > 50.0);
  CHECK(*rb->eta.attenuation_pct < 80.0);
  // the raw effect is real before adjustment
  CHECK(rb->eta.unadjusted > 0.2);
}

TEST_CASE("audit config json parsing and defaults") {
  const auto cfg = AuditConfig::from_json_text(R"({
    "metrics": ["dice", "hd95"],
    "attributes": ["age_group"],
    "alpha": 0.01,
    "seed": 5
  })");
  CHECK(cfg.metrics == std::vector<std::string>{"dice", "hd95_mm"});
  CHECK(cfg.attributes == std::vector<std::string>{"age_group"});
  CHECK(cfg.alpha == 0.01);
  CHECK(cfg.orientation.at("hd95_mm") == Orientation::LowerBetter);
  CHECK(cfg.min_group_size == 5);

  CHECK_THROWS_AS(AuditConfig::from_json_text("{\"alpha\": 2}"), ValidationError);
  CHECK_THROWS_AS(AuditConfig::from_json_text("not json"), ValidationError);
  CHECK_THROWS_AS(AuditConfig::from_json_text("{\"metrics\": [\"volume\"]}"),
                  ValidationError);
}
