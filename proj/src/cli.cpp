#include "segaudit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segaudit/audit.hpp"
#include "segaudit/cohort.hpp"
#include "segaudit/common.hpp"
#include "segaudit/csv.hpp"
#include "segaudit/seg_metrics.hpp"
#include "segaudit/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace segaudit::cli {

namespace {

struct Logger {
  bool json_format = false;
  void event(const std::string& kind, const json& fields) const {
    if (json_format) {
      json j = fields;
      j["event"] = kind;
      j["tool"] = "segaudit";
      j["version"] = kVersion;
      std::cerr << j.dump() << "\n";
    } else {
      std::cerr << "segaudit " << kVersion << " " << kind;
      for (const auto& [k, v] : fields.items())
        std::cerr << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
      std::cerr << "\n";
    }
  }
};

// Case ids found as <id>_<role>.mhd in a directory.
std::map<std::string, fs::path> scan_mask_dir(const std::string& dir,
                                              const std::string& role) {
  const std::string suffix = "_" + role + ".mhd";
  std::map<std::string, fs::path> found;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      found[name.substr(0, name.size() - suffix.size())] = entry.path();
  }
  return found;
}

int cmd_metrics(const std::string& gold_dir, const std::string& silver_dir,
                const std::string& out_path, int jobs, const Logger& log) {
  log.event("metrics", {{"gold_dir", gold_dir},
                        {"silver_dir", silver_dir},
                        {"out", out_path},
                        {"jobs", jobs}});
  const auto gold = scan_mask_dir(gold_dir, "gold");
  const auto silver = scan_mask_dir(silver_dir, "silver");

  std::vector<std::string> matched;
  for (const auto& [id, path] : gold)
    if (silver.count(id)) matched.push_back(id);
  for (const auto& [id, path] : gold)
    if (!silver.count(id)) log.event("unmatched", {{"case_id", id}, {"side", "gold_only"}});
  for (const auto& [id, path] : silver)
    if (!gold.count(id)) log.event("unmatched", {{"case_id", id}, {"side", "silver_only"}});
  if (matched.empty())
    throw ValidationError("no matched gold/silver pairs under " + gold_dir + " and " +
                          silver_dir);

  std::vector<CaseMetrics> results(matched.size());
  std::string first_error;
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, jobs));
#endif
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(matched.size()); ++i) {
    const auto& id = matched[static_cast<std::size_t>(i)];
    try {
      const auto g = read_mask(gold.at(id).string());
      const auto s = read_mask(silver.at(id).string());
      results[static_cast<std::size_t>(i)] = compute_case_metrics(id, g, s);
    } catch (const std::exception& e) {
#pragma omp critical
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw IoError(first_error);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write metrics csv: " + out_path);
  out << format_metrics_csv(results);
  if (!out) throw IoError("write failed: " + out_path);
  log.event("done", {{"cases", matched.size()}});
  return 0;
}

int cmd_audit(const std::string& table_path, const std::string& cohort_path,
              const std::string& metrics_path, const std::string& config_path,
              const std::string& out_dir, const Logger& log) {
  log.event("audit", {{"table", table_path},
                      {"cohort", cohort_path},
                      {"metrics", metrics_path},
                      {"config", config_path},
                      {"out", out_dir}});
  if (table_path.empty() == (cohort_path.empty() && metrics_path.empty()))
    throw ValidationError("provide either --table or both --cohort and --metrics");

  AuditTable table = [&] {
    if (!table_path.empty()) return AuditTable::from_csv_file(table_path);
    if (cohort_path.empty() || metrics_path.empty())
      throw ValidationError("provide either --table or both --cohort and --metrics");
    const auto cohort = Cohort::from_csv_file(cohort_path);
    std::ifstream in(metrics_path, std::ios::binary);
    if (!in) throw IoError("cannot open metrics csv: " + metrics_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    JoinReport join;
    auto t = AuditTable::join_metrics(cohort, parse_metrics_csv(buf.str()), &join);
    for (const auto& id : join.cohort_only)
      log.event("unmatched", {{"case_id", id}, {"side", "cohort_only"}});
    for (const auto& id : join.metrics_only)
      log.event("unmatched", {{"case_id", id}, {"side", "metrics_only"}});
    return t;
  }();

  const AuditConfig config = config_path.empty()
                                 ? AuditConfig{}
                                 : AuditConfig::from_json_file(config_path);
  const auto report = run_audit(table, config);
  render_report(report, ReportFormat::Json, out_dir);
  render_report(report, ReportFormat::Markdown, out_dir);
  render_report(report, ReportFormat::CsvBundle, out_dir);
  log.event("done", {{"rows", table.size()}, {"out", out_dir}});
  return 0;
}

int cmd_synth(const std::string& scenario, const std::string& config_path,
              std::uint64_t seed, bool seed_given, const std::string& out_dir,
              const Logger& log) {
  if (scenario.empty() == config_path.empty())
    throw ValidationError("provide exactly one of --scenario or --config");
  ScenarioConfig config = scenario.empty() ? ScenarioConfig::from_json_file(config_path)
                                           : scenario_library(scenario);
  if (seed_given) config.seed = seed;
  log.event("synth", {{"scenario", config.name},
                      {"seed", config.seed},
                      {"n_cases", config.n_cases},
                      {"out", out_dir}});
  generate_cohort(config, out_dir);
  log.event("done", {{"out", out_dir}});
  return 0;
}

int cmd_balance(const std::string& table_path, const std::string& attribute,
                std::uint64_t seed, const std::string& out_path, const Logger& log) {
  log.event("balance", {{"table", table_path},
                        {"attribute", attribute},
                        {"seed", seed},
                        {"out", out_path}});
  const CsvTable t = read_csv(table_path);
  const int id_col = t.column("case_id");
  if (id_col < 0) throw ValidationError("balance: table has no case_id column");
  const int attr_col = t.column(attribute);
  if (attr_col < 0) throw ValidationError("balance: table has no column '" + attribute + "'");

  std::map<std::string, std::vector<std::string>> by_level;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    if (!seen.insert(row[id_col]).second)
      throw ValidationError("duplicate case_id: " + row[id_col]);
    by_level[row[attr_col]].push_back(row[id_col]);
  }
  const auto selected = balanced_id_sample({by_level.begin(), by_level.end()}, seed);
  const std::set<std::string> keep(selected.begin(), selected.end());

  CsvTable out;
  out.header = t.header;
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : t.rows)
    if (keep.count(row[id_col])) rows.push_back(row);
  std::sort(rows.begin(), rows.end(),
            [&](const auto& a, const auto& b) { return a[id_col] < b[id_col]; });
  out.rows = std::move(rows);
  write_csv(out, out_path);
  log.event("done", {{"rows", out.rows.size()}});
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"segaudit: fairness auditing for medical image segmentations"};
  app.require_subcommand(1);
  std::string log_format = "text";
  app.add_option("--log-format", log_format, "stderr log format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* metrics = app.add_subcommand("metrics", "compute per-case Dice/HD95 from mask pairs");
  std::string gold_dir, silver_dir, metrics_out;
  int jobs = 1;
  metrics->add_option("--gold-dir", gold_dir, "directory with <id>_gold.mhd")->required();
  metrics->add_option("--silver-dir", silver_dir, "directory with <id>_silver.mhd")->required();
  metrics->add_option("--out", metrics_out, "output metrics csv")->required();
  metrics->add_option("--jobs", jobs, "worker pool size")->check(CLI::PositiveNumber);

  auto* audit = app.add_subcommand("audit", "run the fairness analysis battery");
  std::string table_path, cohort_path, metrics_path, audit_config, audit_out;
  audit->add_option("--table", table_path, "audit table csv");
  audit->add_option("--cohort", cohort_path, "cohort csv");
  audit->add_option("--metrics", metrics_path, "metrics csv");
  audit->add_option("--config", audit_config, "audit config json");
  audit->add_option("--out", audit_out, "output directory")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort with masks");
  std::string scenario, synth_config, synth_out;
  std::uint64_t seed = 0;
  synth->add_option("--scenario", scenario, "built-in scenario name");
  synth->add_option("--config", synth_config, "scenario config json");
  auto* seed_opt = synth->add_option("--seed", seed, "override the scenario seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* balance = app.add_subcommand("balance", "downsample levels to the smallest level");
  std::string bal_table, bal_attr, bal_out;
  std::uint64_t bal_seed = 0;
  balance->add_option("--table", bal_table, "input csv with case_id")->required();
  balance->add_option("--attribute", bal_attr, "attribute column to balance")->required();
  balance->add_option("--seed", bal_seed, "sampling seed")->required();
  balance->add_option("--out", bal_out, "output csv")->required();

  auto* version = app.add_subcommand("version", "print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Logger log{log_format == "json"};
  try {
    if (version->parsed()) {
      std::cout << "segaudit " << kVersion << "\n";
      return 0;
    }
    if (metrics->parsed())
      return cmd_metrics(gold_dir, silver_dir, metrics_out, jobs, log);
    if (audit->parsed())
      return cmd_audit(table_path, cohort_path, metrics_path, audit_config, audit_out, log);
    if (synth->parsed())
      return cmd_synth(scenario, synth_config, seed, seed_opt->count() > 0, synth_out, log);
    if (balance->parsed())
      return cmd_balance(bal_table, bal_attr, bal_seed, bal_out, log);
    return 1;
  } catch (const ValidationError& e) {
    log.event("error", {{"kind", "validation"}, {"message", e.what()}});
    return 1;
  } catch (const IoError& e) {
    log.event("error", {{"kind", "io"}, {"message", e.what()}});
    return 2;
  } catch (const std::exception& e) {
    log.event("error", {{"kind", "internal"}, {"message", e.what()}});
    return 3;
  }
}

}  // namespace segaudit::cli
