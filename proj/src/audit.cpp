#include "segaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "segaudit/common.hpp"
#include "segaudit/csv.hpp"
#include "segaudit/numfmt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace segaudit {

void AuditConfig::validate() const {
  if (metrics.empty()) throw ValidationError("audit config: no metrics");
  for (const auto& m : metrics)
    if (m != "dice" && m != "hd95_mm")
      throw ValidationError("audit config: unknown metric '" + m + "'");
  if (attributes.empty()) throw ValidationError("audit config: no attributes");
  for (const auto& a : attributes)
    if (a != "age_group" && a != "ethnicity" && a != "data_source" &&
        a != "expert_rating")
      throw ValidationError("audit config: unknown attribute column '" + a + "'");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("audit config: alpha must be in (0,1)");
  for (const auto& m : metrics)
    if (!orientation.count(m))
      throw ValidationError("audit config: no orientation for metric '" + m + "'");
}

AuditConfig AuditConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("audit config: invalid json: ") + e.what());
  }
  AuditConfig cfg;
  try {
    auto canon_metric = [](std::string m) { return m == "hd95" ? "hd95_mm" : m; };
    if (j.contains("metrics")) {
      cfg.metrics.clear();
      for (const auto& m : j.at("metrics"))
        cfg.metrics.push_back(canon_metric(m.get<std::string>()));
    }
    if (j.contains("attributes"))
      cfg.attributes = j.at("attributes").get<std::vector<std::string>>();
    cfg.source_column = j.value("source_column", cfg.source_column);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("orientation"))
      for (const auto& [key, val] : j.at("orientation").items()) {
        const std::string v = val.get<std::string>();
        if (v != "higher_better" && v != "lower_better")
          throw ValidationError("audit config: orientation must be higher_better or lower_better");
        cfg.orientation[canon_metric(key)] =
            v == "higher_better" ? Orientation::HigherBetter : Orientation::LowerBetter;
      }
    cfg.min_group_size = j.value("min_group_size", cfg.min_group_size);
    cfg.min_source_cases = j.value("min_source_cases", cfg.min_source_cases);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("audit config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

AuditConfig AuditConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audit config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::vector<PosthocRow> posthoc_pairs(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups, double alpha) {
  if (groups.size() < 2) throw ValidationError("posthoc_pairs: need >= 2 groups");
  std::vector<PosthocRow> rows;
  std::vector<double> raw;
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const auto res = stats::mann_whitney_u(groups[i].second, groups[j].second);
      PosthocRow row;
      row.group_a = groups[i].first;
      row.group_b = groups[j].first;
      row.u_stat = res.statistic;
      row.p_raw = res.p_value;
      rows.push_back(row);
      raw.push_back(res.p_value);
    }
  const auto adjusted = stats::bonferroni(raw);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].p_bonferroni = adjusted[k];
    rows[k].significant = adjusted[k] < alpha;
  }
  return rows;
}

namespace {

// Finite metric values split by attribute level, lexicographic.
std::vector<std::pair<std::string, std::vector<double>>> groups_of(
    const AuditTable& table, const std::string& metric, const std::string& attribute) {
  const auto values = table.numeric_column(metric);
  const auto labels = table.categorical_column(attribute);
  std::map<std::string, std::vector<double>> by_level;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i])) by_level[labels[i]].push_back(values[i]);
  return {by_level.begin(), by_level.end()};
}

stats::Dataset dataset_of(const AuditTable& table) {
  stats::Dataset d;
  d.numeric["dice"] = table.numeric_column("dice");
  d.numeric["hd95_mm"] = table.numeric_column("hd95_mm");
  d.numeric["age_years"] = table.numeric_column("age_years");
  d.categorical["age_group"] = table.categorical_column("age_group");
  d.categorical["ethnicity"] = table.categorical_column("ethnicity");
  d.categorical["data_source"] = table.categorical_column("data_source");
  return d;
}

// One (metric, attribute) cell on any table. Returns empty optional and logs
// when the cell cannot run (single level, too few values).
std::optional<MetricAttributeBlock> run_cell(const AuditTable& table,
                                             const AuditConfig& config,
                                             const std::string& metric,
                                             const std::string& attribute,
                                             const std::string& scope,
                                             std::vector<ExclusionEntry>& ledger) {
  const auto groups = groups_of(table, metric, attribute);
  if (groups.size() < 2) {
    ledger.push_back({scope + ":" + metric + ":" + attribute,
                      "fewer than 2 non-empty groups", groups.size()});
    return std::nullopt;
  }
  MetricAttributeBlock block;
  block.kruskal_wallis = stats::kruskal_wallis(
      [&] {
        std::vector<std::vector<double>> g;
        for (const auto& [name, vals] : groups) g.push_back(vals);
        return g;
      }());
  if (block.kruskal_wallis.p_value < config.alpha)
    block.posthoc = posthoc_pairs(groups, config.alpha);
  try {
    block.fairness = fairness_summary(table, metric, attribute,
                                      config.orientation.at(metric),
                                      config.min_group_size);
  } catch (const ValidationError& e) {
    ledger.push_back({scope + ":" + metric + ":" + attribute,
                      std::string("fairness skipped: ") + e.what(), 0});
    return std::nullopt;
  }
  return block;
}

}  // namespace

AuditReport run_audit(const AuditTable& table, const AuditConfig& config) {
  config.validate();
  if (table.size() == 0) throw ValidationError("run_audit: empty table");
  // Surface missing columns before any work, naming the offender.
  for (const auto& a : config.attributes) table.categorical_column(a);
  table.categorical_column(config.source_column);

  AuditReport report;
  report.config = config;
  report.n_rows = table.size();

  // Stage 1: case accounting and normality per metric.
  for (const auto& metric : config.metrics) {
    const auto values = table.numeric_column(metric);
    std::vector<double> finite;
    for (double v : values)
      if (std::isfinite(v)) finite.push_back(v);
    if (finite.empty())
      throw ValidationError("run_audit: every value of metric '" + metric +
                            "' is undefined");
    report.included[metric] = {finite.size(), values.size() - finite.size()};
    if (values.size() != finite.size())
      report.exclusions.push_back({"metric:" + metric,
                                   "undefined values excluded from analyses",
                                   values.size() - finite.size()});
    if (finite.size() >= 3) {
      try {
        report.normality[metric] = stats::shapiro_wilk(finite, config.seed);
      } catch (const ValidationError& e) {
        report.exclusions.push_back(
            {"normality:" + metric, std::string("shapiro_wilk skipped: ") + e.what(), 0});
      }
    } else {
      report.exclusions.push_back(
          {"normality:" + metric, "fewer than 3 finite values", finite.size()});
    }

    const auto age_groups = table.categorical_column("age_group");
    const auto eths = table.categorical_column("ethnicity");
    const auto sources = table.categorical_column("data_source");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::isfinite(values[i]))
        report.per_case.push_back({table.rows()[i].record.case_id, metric, values[i],
                                   age_groups[i], eths[i], sources[i]});
  }

  // Stage 2 + 3: omnibus tests, gated post-hocs, fairness per cell.
  for (const auto& metric : config.metrics)
    for (const auto& attribute : config.attributes) {
      auto cell = run_cell(table, config, metric, attribute, "global", report.exclusions);
      if (cell) report.cells[metric][attribute] = std::move(*cell);
    }

  // Stage 4: regression block per cell.
  const auto data = dataset_of(table);
  for (const auto& metric : config.metrics)
    for (const auto& attribute : config.attributes) {
      if (attribute == config.source_column) {
        report.exclusions.push_back({"regression:" + metric + ":" + attribute,
                                     "attribute equals the source column", 0});
        report.regressions[metric][attribute] = std::nullopt;
        continue;
      }
      if (attribute == "expert_rating") {
        report.exclusions.push_back({"regression:" + metric + ":" + attribute,
                                     "categorical outcome, not modeled by OLS", 0});
        report.regressions[metric][attribute] = std::nullopt;
        continue;
      }
      try {
        const auto t_attr = stats::Term::categorical(attribute);
        const auto t_src = stats::Term::categorical(config.source_column);
        RegressionBlock block;
        block.baseline = stats::fit_model(data, metric, {t_attr});
        block.adjusted = stats::fit_model(data, metric, {t_attr, t_src});
        block.anova_source = stats::anova_nested(block.baseline, block.adjusted);
        try {
          block.interaction = stats::fit_model(
              data, metric, {t_attr, t_src, stats::Term::interaction(t_attr, t_src)});
          block.anova_interaction = stats::anova_nested(block.adjusted, *block.interaction);
        } catch (const ValidationError& e) {
          report.exclusions.push_back({"regression:" + metric + ":" + attribute,
                                       std::string("interaction model skipped: ") + e.what(),
                                       0});
        }
        block.eta = stats::eta_squared(data, metric, t_attr, {t_src});
        report.regressions[metric][attribute] = std::move(block);
      } catch (const ValidationError& e) {
        report.exclusions.push_back({"regression:" + metric + ":" + attribute,
                                     std::string("skipped: ") + e.what(), 0});
        report.regressions[metric][attribute] = std::nullopt;
      }
    }

  // Stage 5: disaggregation by source.
  {
    const auto sources = table.categorical_column(config.source_column);
    std::map<std::string, std::vector<AuditRow>> by_source;
    for (std::size_t i = 0; i < table.rows().size(); ++i)
      by_source[sources[i]].push_back(table.rows()[i]);
    for (const auto& [source, rows] : by_source) {
      if (rows.size() < config.min_source_cases) {
        report.exclusions.push_back({"by_source:" + source,
                                     "below minimum case count for disaggregation",
                                     rows.size()});
        continue;
      }
      const auto sub = AuditTable::from_rows(rows);
      SourceBlock sb;
      sb.n_cases = rows.size();
      for (const auto& metric : config.metrics)
        for (const auto& attribute : config.attributes) {
          if (attribute == config.source_column) continue;
          auto cell = run_cell(sub, config, metric, attribute, "source:" + source,
                               report.exclusions);
          if (cell) sb.cells[metric][attribute] = std::move(*cell);
        }
      report.by_source[source] = std::move(sb);
    }
  }

  // Stage 6: expert ratings.
  if (table.has_ratings()) {
    const auto ratings = table.categorical_column("expert_rating");
    for (const auto& attribute : config.attributes) {
      if (attribute == "expert_rating") continue;
      const auto labels = table.categorical_column(attribute);
      std::set<std::string> rating_levels, attr_levels;
      for (std::size_t i = 0; i < ratings.size(); ++i)
        if (!ratings[i].empty()) {
          rating_levels.insert(ratings[i]);
          attr_levels.insert(labels[i]);
        }
      if (rating_levels.size() < 2 || attr_levels.size() < 2) {
        report.exclusions.push_back({"ratings:" + attribute,
                                     "contingency table needs >= 2x2 levels", 0});
        continue;
      }
      RatingsBlock rb;
      rb.rating_levels.assign(rating_levels.begin(), rating_levels.end());
      rb.attribute_levels.assign(attr_levels.begin(), attr_levels.end());
      rb.counts.assign(rb.rating_levels.size(),
                       std::vector<std::int64_t>(rb.attribute_levels.size(), 0));
      for (std::size_t i = 0; i < ratings.size(); ++i) {
        if (ratings[i].empty()) continue;
        const auto ri = std::lower_bound(rb.rating_levels.begin(), rb.rating_levels.end(),
                                         ratings[i]) -
                        rb.rating_levels.begin();
        const auto ci = std::lower_bound(rb.attribute_levels.begin(),
                                         rb.attribute_levels.end(), labels[i]) -
                        rb.attribute_levels.begin();
        rb.counts[ri][ci]++;
      }
      try {
        rb.chi_square = stats::chi_square_independence(rb.counts);
        report.ratings[attribute] = std::move(rb);
      } catch (const ValidationError& e) {
        report.exclusions.push_back({"ratings:" + attribute,
                                     std::string("chi_square skipped: ") + e.what(), 0});
      }
    }
  } else {
    report.exclusions.push_back({"ratings", "no expert ratings in table", 0});
  }

  return report;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

json to_json(const stats::TestResult& t) {
  return {{"method", t.method},
          {"statistic", t.statistic},
          {"df", t.df},
          {"p_value", t.p_value},
          {"flags", t.flags}};
}

json to_json(const stats::RegressionResult& r) {
  json coeffs = json::array();
  for (const auto& c : r.coefficients)
    coeffs.push_back({{"name", c.name},
                      {"beta", c.beta},
                      {"se", c.se},
                      {"t", c.t_stat},
                      {"p_value", c.p_value}});
  return {{"response", r.response},
          {"terms", r.term_labels},
          {"n", r.n},
          {"p", r.p},
          {"rss", r.rss},
          {"tss", r.tss},
          {"r2", r.r2},
          {"df_resid", r.df_resid()},
          {"f_stat", r.f_stat ? json(*r.f_stat) : json()},
          {"f_p_value", r.f_p_value ? json(*r.f_p_value) : json()},
          {"degenerate", r.degenerate},
          {"coefficients", coeffs}};
}

json to_json(const FairnessResult& f) {
  json groups = json::array();
  for (const auto& g : f.groups)
    groups.push_back({{"group", g.group},
                      {"n", g.n},
                      {"mean", g.mean},
                      {"sd", g.sd},
                      {"rate_high", g.rate_high},
                      {"insufficient_n", g.insufficient_n}});
  json pairs = json::array();
  for (const auto& p : f.pairs)
    pairs.push_back({{"group_a", p.group_a},
                     {"group_b", p.group_b},
                     {"dpd", p.dpd},
                     {"dir", p.dir ? json(*p.dir) : json()}});
  auto pair_json = [](const std::optional<FairnessPair>& p, bool use_dir) {
    if (!p) return json();
    json j = {{"group_a", p->group_a}, {"group_b", p->group_b}};
    if (use_dir) j["dir"] = p->dir ? json(*p->dir) : json();
    else j["dpd"] = p->dpd;
    return j;
  };
  return {{"metric", f.metric},
          {"attribute", f.attribute},
          {"orientation", to_string(f.orientation)},
          {"threshold", f.threshold},
          {"n_included", f.n_included},
          {"n_excluded", f.n_excluded},
          {"groups", groups},
          {"pairs", pairs},
          {"worst_dpd", pair_json(f.worst_dpd_pair, false)},
          {"worst_dir", pair_json(f.worst_dir_pair, true)},
          {"gap", f.gap},
          {"gap_high_group", f.gap_high_group},
          {"gap_low_group", f.gap_low_group}};
}

json to_json(const std::vector<PosthocRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"group_a", r.group_a},
                   {"group_b", r.group_b},
                   {"u", r.u_stat},
                   {"p_raw", r.p_raw},
                   {"p_bonferroni", r.p_bonferroni},
                   {"significant", r.significant}});
  return out;
}

json to_json(const MetricAttributeBlock& b) {
  return {{"kruskal_wallis", to_json(b.kruskal_wallis)},
          {"posthoc", b.posthoc ? to_json(*b.posthoc) : json()},
          {"fairness", to_json(b.fairness)}};
}

json to_json(const RegressionBlock& b) {
  return {{"baseline", to_json(b.baseline)},
          {"adjusted", to_json(b.adjusted)},
          {"interaction", b.interaction ? to_json(*b.interaction) : json()},
          {"anova_source", to_json(b.anova_source)},
          {"anova_interaction", b.anova_interaction ? to_json(*b.anova_interaction) : json()},
          {"eta_squared",
           {{"unadjusted", b.eta.unadjusted},
            {"adjusted_delta", b.eta.adjusted_delta},
            {"attenuation_pct",
             b.eta.attenuation_pct ? json(*b.eta.attenuation_pct) : json()}}}};
}

json config_to_json(const AuditConfig& c) {
  json orient;
  for (const auto& [m, o] : c.orientation) orient[m] = to_string(o);
  return {{"metrics", c.metrics},
          {"attributes", c.attributes},
          {"source_column", c.source_column},
          {"alpha", c.alpha},
          {"orientation", orient},
          {"min_group_size", c.min_group_size},
          {"min_source_cases", c.min_source_cases},
          {"seed", c.seed}};
}

}  // namespace

std::string AuditReport::to_json_text() const {
  json j;
  j["schema_version"] = 1;
  j["tool"] = {{"name", "segaudit"}, {"version", kVersion}};
  j["config"] = config_to_json(config);
  j["n_rows"] = n_rows;
  json inc;
  for (const auto& [m, io] : included)
    inc[m] = {{"included", io.first}, {"excluded", io.second}};
  j["included"] = inc;
  json norm;
  for (const auto& [m, t] : normality) norm[m] = to_json(t);
  j["normality"] = norm;
  json jcells;
  for (const auto& [m, attrs] : cells)
    for (const auto& [a, block] : attrs) jcells[m][a] = to_json(block);
  j["cells"] = jcells;
  json jregs;
  for (const auto& [m, attrs] : regressions)
    for (const auto& [a, block] : attrs)
      jregs[m][a] = block ? to_json(*block) : json();
  j["regressions"] = jregs;
  json jsrc;
  for (const auto& [s, sb] : by_source) {
    json cellsj;
    for (const auto& [m, attrs] : sb.cells)
      for (const auto& [a, block] : attrs) cellsj[m][a] = to_json(block);
    jsrc[s] = {{"n_cases", sb.n_cases}, {"cells", cellsj}};
  }
  j["by_source"] = jsrc;
  json jratings;
  for (const auto& [a, rb] : ratings)
    jratings[a] = {{"chi_square", to_json(rb.chi_square)},
                   {"rating_levels", rb.rating_levels},
                   {"attribute_levels", rb.attribute_levels},
                   {"counts", rb.counts}};
  j["ratings"] = jratings;
  json jex = json::array();
  for (const auto& e : exclusions)
    jex.push_back({{"analysis", e.analysis}, {"reason", e.reason}, {"count", e.count}});
  j["exclusions"] = jex;
  return j.dump(2) + "\n";
}

namespace {

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void markdown_cell(std::ostringstream& md, const std::string& metric,
                   const std::string& attribute, const MetricAttributeBlock& b,
                   int heading_level) {
  const std::string h(static_cast<std::size_t>(heading_level), '#');
  md << h << " " << metric << " by " << attribute << "\n\n";
  md << "| group | n | mean | sd | rate_high |\n";
  md << "|---|---|---|---|---|\n";
  for (const auto& g : b.fairness.groups)
    md << "| " << g.group << (g.insufficient_n ? " (insufficient n)" : "") << " | "
       << g.n << " | " << fmt4(g.mean) << " | " << fmt4(g.sd) << " | "
       << fmt4(g.rate_high) << " |\n";
  md << "\ngap=" << fmt4(b.fairness.gap)
     << " (p=" << format_pvalue(b.kruskal_wallis.p_value) << ")\n\n";
  if (b.fairness.worst_dpd_pair)
    md << "- worst DPD " << fmt4(b.fairness.worst_dpd_pair->dpd) << " ("
       << b.fairness.worst_dpd_pair->group_a << " vs "
       << b.fairness.worst_dpd_pair->group_b << ")\n";
  if (b.fairness.worst_dir_pair && b.fairness.worst_dir_pair->dir)
    md << "- worst DIR " << fmt4(*b.fairness.worst_dir_pair->dir) << " ("
       << b.fairness.worst_dir_pair->group_a << " vs "
       << b.fairness.worst_dir_pair->group_b << ")\n";
  md << "- Kruskal-Wallis H=" << fmt4(b.kruskal_wallis.statistic)
     << ", df=" << b.kruskal_wallis.df[0]
     << ", p=" << format_pvalue(b.kruskal_wallis.p_value) << "\n";
  if (b.posthoc) {
    md << "\n| pair | U | p_raw | p_bonferroni | significant |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& r : *b.posthoc)
      md << "| " << r.group_a << " vs " << r.group_b << " | " << r.u_stat << " | "
         << format_pvalue(r.p_raw) << " | " << format_pvalue(r.p_bonferroni) << " | "
         << (r.significant ? "yes" : "no") << " |\n";
  }
  md << "\n";
}

}  // namespace

std::string AuditReport::to_markdown() const {
  std::ostringstream md;
  md << "# Segmentation fairness audit\n\n";
  md << "- tool: segaudit " << kVersion << " (report schema 1)\n";
  md << "- rows: " << n_rows << "\n";
  md << "- alpha: " << config.alpha << "\n";
  md << "- minimum group size for rates: " << config.min_group_size << "\n";
  md << "- minimum cases for source disaggregation: " << config.min_source_cases
     << "\n\n";

  md << "## Case accounting\n\n| metric | included | excluded |\n|---|---|---|\n";
  for (const auto& [m, io] : included)
    md << "| " << m << " | " << io.first << " | " << io.second << " |\n";
  md << "\n";

  if (!normality.empty()) {
    md << "## Normality (Shapiro-Wilk)\n\n";
    for (const auto& [m, t] : normality)
      md << "- " << m << ": W=" << fmt4(t.statistic)
         << ", p=" << format_pvalue(t.p_value) << "\n";
    md << "\n";
  }

  for (const auto& [metric, attrs] : cells)
    for (const auto& [attribute, block] : attrs) {
      markdown_cell(md, metric, attribute, block, 2);
      const auto rm = regressions.find(metric);
      if (rm != regressions.end()) {
        const auto ra = rm->second.find(attribute);
        if (ra != rm->second.end() && ra->second) {
          const RegressionBlock& rb = *ra->second;
          md << "Models (" << metric << " ~ " << attribute << "):\n\n";
          md << "- baseline: R2=" << fmt4(rb.baseline.r2) << ", F p="
             << (rb.baseline.f_p_value ? format_pvalue(*rb.baseline.f_p_value) : "n/a")
             << "\n";
          md << "- adjusted (+ " << config.source_column
             << "): R2=" << fmt4(rb.adjusted.r2) << "\n";
          md << "- source effect ANOVA: F=" << fmt4(rb.anova_source.statistic)
             << ", p=" << format_pvalue(rb.anova_source.p_value) << "\n";
          if (rb.anova_interaction)
            md << "- interaction ANOVA: F=" << fmt4(rb.anova_interaction->statistic)
               << ", p=" << format_pvalue(rb.anova_interaction->p_value) << "\n";
          md << "- eta2 unadjusted=" << fmt4(rb.eta.unadjusted)
             << ", adjusted delta=" << fmt4(rb.eta.adjusted_delta);
          if (rb.eta.attenuation_pct)
            md << ", attenuation=" << fmt4(*rb.eta.attenuation_pct) << "%";
          md << "\n\n";
        }
      }
    }

  if (!by_source.empty()) {
    md << "## Disaggregated by " << config.source_column << "\n\n";
    for (const auto& [source, sb] : by_source) {
      md << "### " << source << " (n=" << sb.n_cases << ")\n\n";
      for (const auto& [metric, attrs] : sb.cells)
        for (const auto& [attribute, block] : attrs)
          markdown_cell(md, metric, attribute, block, 4);
    }
  }

  if (!ratings.empty()) {
    md << "## Expert ratings\n\n";
    for (const auto& [attribute, rb] : ratings)
      md << "- expert_rating x " << attribute
         << ": chi2=" << fmt4(rb.chi_square.statistic) << ", df=" << rb.chi_square.df[0]
         << ", p=" << format_pvalue(rb.chi_square.p_value) << "\n";
    md << "\n";
  }

  md << "## Exclusions\n\n";
  if (exclusions.empty()) md << "(none)\n";
  for (const auto& e : exclusions)
    md << "- " << e.analysis << ": " << e.reason << " (count " << e.count << ")\n";
  return md.str();
}

std::vector<std::string> render_report(const AuditReport& report, ReportFormat format,
                                       const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  auto write_file = [](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
  };

  std::vector<std::string> written;
  if (format == ReportFormat::Json) {
    const auto path = fs::path(out_dir) / "audit.json";
    write_file(path, report.to_json_text());
    written.push_back(path.string());
    return written;
  }
  if (format == ReportFormat::Markdown) {
    const auto path = fs::path(out_dir) / "audit.md";
    write_file(path, report.to_markdown());
    written.push_back(path.string());
    return written;
  }

  const fs::path tables = fs::path(out_dir) / "tables";
  fs::create_directories(tables, ec);
  if (ec) throw IoError("cannot create tables directory");

  CsvTable per_case;
  per_case.header = {"case_id", "metric", "value", "age_group", "ethnicity",
                     "data_source"};
  for (const auto& p : report.per_case)
    per_case.rows.push_back({p.case_id, p.metric, format_double(p.value), p.age_group,
                             p.ethnicity, p.data_source});
  write_csv(per_case, (tables / "per_case_scores.csv").string());
  written.push_back((tables / "per_case_scores.csv").string());

  CsvTable summaries;
  summaries.header = {"metric", "attribute", "group", "n", "mean", "sd", "rate_high"};
  CsvTable pairs;
  pairs.header = {"metric", "attribute", "group_a", "group_b", "dpd", "dir"};
  for (const auto& [metric, attrs] : report.cells)
    for (const auto& [attribute, block] : attrs) {
      for (const auto& g : block.fairness.groups)
        summaries.rows.push_back({metric, attribute, g.group, std::to_string(g.n),
                                  format_double(g.mean), format_double(g.sd),
                                  format_double(g.rate_high)});
      for (const auto& p : block.fairness.pairs)
        pairs.rows.push_back({metric, attribute, p.group_a, p.group_b,
                              format_double(p.dpd),
                              p.dir ? format_double(*p.dir) : "NA"});
    }
  write_csv(summaries, (tables / "group_summaries.csv").string());
  written.push_back((tables / "group_summaries.csv").string());
  write_csv(pairs, (tables / "fairness_pairs.csv").string());
  written.push_back((tables / "fairness_pairs.csv").string());

  CsvTable coeffs;
  coeffs.header = {"metric", "attribute", "model", "term", "beta", "se", "t", "p_value"};
  for (const auto& [metric, attrs] : report.regressions)
    for (const auto& [attribute, block] : attrs) {
      if (!block) continue;
      auto emit = [&](const std::string& model, const stats::RegressionResult& r) {
        for (const auto& cf : r.coefficients)
          coeffs.rows.push_back({metric, attribute, model, cf.name,
                                 format_double(cf.beta), format_double(cf.se),
                                 format_double(cf.t_stat), format_double(cf.p_value)});
      };
      emit("baseline", block->baseline);
      emit("adjusted", block->adjusted);
      if (block->interaction) emit("interaction", *block->interaction);
    }
  write_csv(coeffs, (tables / "regression_coefficients.csv").string());
  written.push_back((tables / "regression_coefficients.csv").string());
  return written;
}

}  // namespace segaudit
