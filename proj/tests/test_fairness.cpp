#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "segaudit/cohort.hpp"
#include "segaudit/common.hpp"
#include "segaudit/fairness.hpp"
#include "segaudit/rng.hpp"

using namespace segaudit;

namespace {

// Table where each (group, score) pair becomes one row.
AuditTable table_from_scores(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
  std::vector<AuditRow> rows;
  int k = 0;
  for (const auto& [label, scores] : groups)
    for (double s : scores) {
      AuditRow r;
      r.record.case_id = "c" + std::to_string(1000 + k++);
      r.record.age_years = 50.0;
      r.record.ethnicity = label;
      r.record.data_source = "src";
      r.dice = std::clamp(s, 0.0, 1.0);
      r.hd95_mm = s;  // unconstrained metric channel for gap tests
      rows.push_back(std::move(r));
    }
  return AuditTable::from_rows(std::move(rows));
}

OutcomeTable outcomes_from_counts(std::size_t na, std::size_t ka, std::size_t nb,
                                  std::size_t kb) {
  OutcomeTable t;
  for (std::size_t i = 0; i < na; ++i) {
    t.outcome.push_back(i < ka ? 1 : 0);
    t.group.push_back("a");
  }
  for (std::size_t i = 0; i < nb; ++i) {
    t.outcome.push_back(i < kb ? 1 : 0);
    t.group.push_back("b");
  }
  return t;
}

}  // namespace

TEST_CASE("binarize_top_quartile: scores 1..8, higher-better") {
  const std::vector<double> scores = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto out = binarize_top_quartile(scores, Orientation::HigherBetter);
  CHECK(out.threshold == doctest::Approx(6.25).epsilon(1e-12));
  int high = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (out.outcome[i]) {
      ++high;
      CHECK(scores[i] >= 6.25);
    }
  CHECK(high == 2);
}

TEST_CASE("binarize_top_quartile: scores 1..8, lower-better") {
  const std::vector<double> scores = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto out = binarize_top_quartile(scores, Orientation::LowerBetter);
  CHECK(out.threshold == doctest::Approx(2.75).epsilon(1e-12));
  int high = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (out.outcome[i]) {
      ++high;
      CHECK(scores[i] <= 2.75);
    }
  CHECK(high == 2);
}

TEST_CASE("binarize_top_quartile: all-equal scores make everyone high") {
  const auto out =
      binarize_top_quartile({3, 3, 3, 3, 3}, Orientation::HigherBetter);
  CHECK(out.threshold == 3.0);
  for (int o : out.outcome) CHECK(o == 1);
}

TEST_CASE("binarize_top_quartile errors") {
  CHECK_THROWS_AS(binarize_top_quartile({1, 2, 3}, Orientation::HigherBetter),
                  ValidationError);
  CHECK_THROWS_AS(
      binarize_top_quartile({1, 2, 3, std::nan("")}, Orientation::HigherBetter),
      ValidationError);
}

TEST_CASE("exactly 25% high performers for tie-free scores, n divisible by 4") {
  Rng rng(606);
  for (std::size_t n : {4u, 8u, 12u, 40u, 100u}) {
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.next_double();
    std::sort(scores.begin(), scores.end());
    const auto hi = binarize_top_quartile(scores, Orientation::HigherBetter);
    const auto lo = binarize_top_quartile(scores, Orientation::LowerBetter);
    std::size_t chi = 0, clo = 0;
    for (std::size_t i = 0; i < n; ++i) {
      chi += hi.outcome[i];
      clo += lo.outcome[i];
    }
    CHECK(chi == n / 4);
    CHECK(clo == n / 4);
  }
}

TEST_CASE("higher-better outcomes are invariant under increasing transforms") {
  Rng rng(607);
  std::vector<double> scores(25);
  for (auto& s : scores) s = rng.next_double() * 5.0;
  const auto base = binarize_top_quartile(scores, Orientation::HigherBetter);
  auto transformed = scores;
  for (auto& s : transformed) s = std::exp(0.7 * s) + 2.0;
  const auto after = binarize_top_quartile(transformed, Orientation::HigherBetter);
  CHECK(base.outcome == after.outcome);
}

TEST_CASE("dpd hand cases") {
  CHECK(dpd(outcomes_from_counts(4, 2, 4, 1), "a", "b") ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(dpd(outcomes_from_counts(4, 2, 4, 2), "a", "b") == 0.0);
  CHECK_THROWS_AS(dpd(outcomes_from_counts(4, 2, 4, 1), "a", "zz"), ValidationError);
}

TEST_CASE("dpd/dir at the values reported for the engineered rates") {
  // rates 0.2069 vs 0.2956 (counts over 10000 per group)
  const auto t = outcomes_from_counts(10000, 2069, 10000, 2956);
  CHECK(dpd(t, "a", "b") == doctest::Approx(0.0887).epsilon(1e-12));
  CHECK(*dir(t, "a", "b") == doctest::Approx(0.699).epsilon(1e-3));
}

TEST_CASE("dir hand cases") {
  CHECK(*dir(outcomes_from_counts(4, 2, 4, 1), "a", "b") ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*dir(outcomes_from_counts(10, 3, 10, 3), "a", "b") == 1.0);
  CHECK_FALSE(dir(outcomes_from_counts(5, 0, 5, 0), "a", "b").has_value());
}

TEST_CASE("fairness_gap reproduces the stratified-mean differences") {
  // group means 0.8082 / 0.8204 / 0.8612 -> 0.0530
  const auto automated = table_from_scores({{"Young", {0.8082, 0.8082}},
                                            {"Middle", {0.8204, 0.8204}},
                                            {"Older", {0.8612, 0.8612}}});
  CHECK(fairness_gap(automated, "dice", "ethnicity") ==
        doctest::Approx(0.0530).epsilon(1e-10));

  // group means 0.7304 / 0.7333 / 0.7703 -> 0.0399
  const auto balanced = table_from_scores({{"Young", {0.7304, 0.7304}},
                                           {"Middle", {0.7333, 0.7333}},
                                           {"Older", {0.7703, 0.7703}}});
  CHECK(fairness_gap(balanced, "dice", "ethnicity") ==
        doctest::Approx(0.0399).epsilon(1e-10));

  const auto flat = table_from_scores(
      {{"a", {0.5, 0.6}}, {"b", {0.5, 0.6}}, {"c", {0.6, 0.5}}});
  CHECK(fairness_gap(flat, "dice", "ethnicity") == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(fairness_gap(table_from_scores({{"only", {1, 2, 3}}}), "dice",
                               "ethnicity"),
                  ValidationError);
}

TEST_CASE("fairness_gap invariances") {
  Rng rng(909);
  std::vector<std::pair<std::string, std::vector<double>>> groups = {
      {"g1", {}}, {"g2", {}}, {"g3", {}}};
  for (auto& [name, v] : groups)
    for (int i = 0; i < 12; ++i) v.push_back(rng.next_double() * 3.0);
  const auto base = fairness_gap(table_from_scores(groups), "hd95_mm", "ethnicity");

  auto relabeled = groups;
  relabeled[0].first = "zz";
  CHECK(fairness_gap(table_from_scores(relabeled), "hd95_mm", "ethnicity") ==
        doctest::Approx(base).epsilon(1e-12));

  auto shifted = groups;
  for (auto& [name, v] : shifted)
    for (auto& s : v) s += 10.0;
  CHECK(fairness_gap(table_from_scores(shifted), "hd95_mm", "ethnicity") ==
        doctest::Approx(base).epsilon(1e-9));

  auto scaled = groups;
  for (auto& [name, v] : scaled)
    for (auto& s : v) s *= 3.0;
  CHECK(fairness_gap(table_from_scores(scaled), "hd95_mm", "ethnicity") ==
        doctest::Approx(3.0 * base).epsilon(1e-9));
}

TEST_CASE("fairness_summary: identical distributions give parity") {
  const std::vector<double> sample = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  const auto table = table_from_scores({{"g1", sample}, {"g2", sample}});
  const auto res =
      fairness_summary(table, "dice", "ethnicity", Orientation::HigherBetter);
  REQUIRE(res.worst_dpd_pair.has_value());
  CHECK(res.worst_dpd_pair->dpd == 0.0);
  REQUIRE(res.worst_dir_pair.has_value());
  CHECK(*res.worst_dir_pair->dir == 1.0);
  CHECK(res.gap == 0.0);
}

TEST_CASE("fairness_summary: a +0.1-shifted group attains max mean and the gap") {
  Rng rng(910);
  std::vector<double> base(30);
  for (auto& v : base) v = 0.3 + 0.2 * rng.next_double();
  std::vector<double> shifted = base;
  for (auto& v : shifted) v += 0.1;
  const auto table =
      table_from_scores({{"g1", base}, {"g2", base}, {"g3", shifted}});
  const auto res =
      fairness_summary(table, "dice", "ethnicity", Orientation::HigherBetter);
  CHECK(res.gap_high_group == "g3");
  CHECK(res.gap == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("fairness_summary: groups below min size are flagged and skipped for worst pair") {
  const std::vector<double> big = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto table = table_from_scores(
      {{"big1", big}, {"big2", big}, {"tiny", {0.9, 0.95}}});
  const auto res =
      fairness_summary(table, "dice", "ethnicity", Orientation::HigherBetter, 5);
  bool tiny_flagged = false;
  for (const auto& g : res.groups)
    if (g.group == "tiny") tiny_flagged = g.insufficient_n;
  CHECK(tiny_flagged);
  REQUIRE(res.worst_dpd_pair.has_value());
  CHECK(res.worst_dpd_pair->group_a != "tiny");
  CHECK(res.worst_dpd_pair->group_b != "tiny");
  // but the gap still sees every non-empty group
  CHECK(res.gap_high_group == "tiny");
}

TEST_CASE("fairness_summary threshold is population-level, not per group") {
  // One strong and one weak group: per-group thresholds would equalize the
  // rates by construction; the common bar must not.
  std::vector<double> weak(20), strong(20);
  for (int i = 0; i < 20; ++i) {
    weak[i] = 0.1 + 0.001 * i;
    strong[i] = 0.8 + 0.001 * i;
  }
  const auto table = table_from_scores({{"strong", strong}, {"weak", weak}});
  const auto res =
      fairness_summary(table, "dice", "ethnicity", Orientation::HigherBetter);
  double rate_weak = -1, rate_strong = -1;
  for (const auto& g : res.groups) {
    if (g.group == "weak") rate_weak = g.rate_high;
    if (g.group == "strong") rate_strong = g.rate_high;
  }
  CHECK(rate_weak == 0.0);
  CHECK(rate_strong == 0.5);
}

TEST_CASE("fairness_summary excludes undefined metric rows and counts them") {
  std::vector<AuditRow> rows;
  for (int i = 0; i < 12; ++i) {
    AuditRow r;
    r.record.case_id = "c" + std::to_string(i + 10);
    r.record.age_years = 50;
    r.record.ethnicity = i % 2 ? "g1" : "g2";
    r.record.data_source = "s";
    r.dice = 0.5 + 0.02 * i;
    if (i % 3 != 0) r.hd95_mm = 1.0 + i;
    rows.push_back(std::move(r));
  }
  const auto table = AuditTable::from_rows(std::move(rows));
  const auto res =
      fairness_summary(table, "hd95_mm", "ethnicity", Orientation::LowerBetter);
  CHECK(res.n_excluded == 4);
  CHECK(res.n_included == 8);
}
