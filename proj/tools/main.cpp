#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "berest/harness.hpp"
#include "berest/reporting.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_calibrate(const std::string& family_name_arg, int d, double lo,
                  double hi, double max_gap, std::uint64_t seed,
                  const std::string& profile, double variance,
                  const std::string& out_dir) {
  using namespace berest;
  const Family family = family_from_name(family_name_arg);
  CalibrationOptions opts;
  opts.profile = profile_from_name(profile);
  opts.var_a = variance;
  opts.var_b = variance;

  RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(d),
                                StreamPurpose::Calibration);
  const CalibratedParameterTable table =
      calibrate(family, d, lo, hi, max_gap, rng, opts);

  fs::create_directories(out_dir);
  const fs::path path =
      fs::path(out_dir) / table_cache_name(family, d, lo, hi, seed, opts.profile);
  std::ofstream out(path);
  out << table_to_json(table);
  std::cout << "wrote " << table.entries.size() << " entries covering BER ["
            << table.min_ber() << ", " << table.max_ber() << "] to " << path
            << "\n";
  return 0;
}

int cmd_run(const std::string& config_path) {
  using namespace berest;
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open config: " << config_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const CampaignConfig config = config_from_json(buf.str());
  const auto cells = run_campaign(config);
  for (const auto& cell : cells) {
    std::cout << "d=" << cell.d << " n=" << cell.n_per_class << ": "
              << cell.completed << " completed, " << cell.failed << " failed, "
              << cell.skipped_existing << " resumed -> " << cell.records_path
              << "\n";
  }
  return 0;
}

int cmd_report(const std::string& records_dir, const std::string& group_by,
               const std::vector<std::string>& estimators,
               const std::string& format, const std::string& plots_dir,
               double span) {
  using namespace berest;
  std::vector<EstimateRecord> records;
  int skipped = 0;
  for (const auto& entry : fs::directory_iterator(records_dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("records_", 0) != 0 || entry.path().extension() != ".ndjson")
      continue;
    auto result = read_records(entry.path().string());
    skipped += result.skipped;
    for (auto& r : result.records) records.push_back(std::move(r));
  }
  if (records.empty()) {
    std::cerr << "no records found under " << records_dir << "\n";
    return 1;
  }
  if (skipped > 0)
    std::cerr << "warning: skipped " << skipped << " corrupt record rows\n";

  if (!estimators.empty()) {
    for (auto& r : records) {
      std::map<std::string, double> kept;
      for (const auto& id : estimators) {
        const auto it = r.estimates.find(id);
        if (it != r.estimates.end()) kept[id] = it->second;
      }
      r.estimates = std::move(kept);
    }
  }

  // Collapse grouping keys that were not requested.
  const bool by_family = group_by.find("family") != std::string::npos;
  const bool by_d = group_by.find('d') != std::string::npos;
  const bool by_n = group_by.find('n') != std::string::npos;
  for (auto& r : records) {
    if (!by_family) r.scenario_id = "all";
    if (!by_d) r.d = 0;
    if (!by_n) r.n_per_class = 0;
  }

  const SummaryTable table = best_estimator_table(records);
  if (format == "md")
    std::cout << summary_to_markdown(table);
  else
    std::cout << summary_to_csv(table);

  if (!plots_dir.empty()) {
    fs::create_directories(plots_dir);
    std::set<std::string> ids;
    for (const auto& r : records)
      for (const auto& [id, v] : r.estimates) ids.insert(id);
    for (const auto& id : ids) {
      const auto base = (fs::path(plots_dir) / ("scatter_" + id)).string();
      emit_plot(records, id, base + ".csv", base + ".svg", span);
    }
    std::cerr << "plots written to " << plots_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes error rate estimator test bench"};
  app.require_subcommand(1);

  // calibrate
  std::string family = "GvG";
  int d = 2;
  std::vector<double> range = {0.01, 0.49};
  double max_gap = 0.01;
  std::uint64_t seed = 1;
  std::string profile = "reference";
  double variance = 0.3;
  std::string out_dir = "campaign_out";
  auto* cal = app.add_subcommand("calibrate",
                                 "Build a ground-truth BER table for a family");
  cal->add_option("--family", family, "GvG, TvT, TvS or SvS")->required();
  cal->add_option("--d", d, "feature count")->required();
  cal->add_option("--range", range, "BER range lo hi")->expected(2);
  cal->add_option("--max-gap", max_gap, "maximum adjacent BER gap");
  cal->add_option("--seed", seed, "master seed");
  cal->add_option("--profile", profile, "reference or desk");
  cal->add_option("--variance", variance, "component variance for both classes");
  cal->add_option("--out", out_dir, "output directory");

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a simulation campaign");
  run->add_option("--config", config_path, "campaign config JSON")->required();

  // report
  std::string records_dir;
  std::string group_by = "family,d,n";
  std::vector<std::string> estimators;
  std::string format = "csv";
  std::string plots_dir;
  double span = 0.3;
  auto* rep = app.add_subcommand("report", "Aggregate records into tables");
  rep->add_option("--records", records_dir, "directory of records files")
      ->required();
  rep->add_option("--group-by", group_by, "subset of family,d,n");
  rep->add_option("--estimators", estimators, "estimator ids to include");
  rep->add_option("--format", format, "csv or md");
  rep->add_option("--plots", plots_dir, "emit scatter+LOESS plots here");
  rep->add_option("--span", span, "LOESS span fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cal->parsed())
      return cmd_calibrate(family, d, range[0], range[1], max_gap, seed,
                           profile, variance, out_dir);
    if (run->parsed()) return cmd_run(config_path);
    if (rep->parsed())
      return cmd_report(records_dir, group_by, estimators, format, plots_dir,
                        span);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
