#include "berest/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "berest/parallel.hpp"

namespace berest {

namespace {

constexpr int kSchemaVersion = 1;

nlohmann::json record_to_json(const EstimateRecord& r) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["run_id"] = r.run_id;
  j["scenario_id"] = r.scenario_id;
  j["seed"] = r.seed;
  j["d"] = r.d;
  j["n_per_class"] = r.n_per_class;
  j["true_ber"] = r.true_ber;
  j["estimates"] = r.estimates;
  return j;
}

EstimateRecord record_from_json(const nlohmann::json& j) {
  EstimateRecord r;
  r.run_id = j.at("run_id").get<int>();
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.d = j.at("d").get<int>();
  r.n_per_class = j.at("n_per_class").get<int>();
  r.true_ber = j.at("true_ber").get<double>();
  r.estimates = j.at("estimates").get<std::map<std::string, double>>();
  return r;
}

}  // namespace

std::string config_to_json(const CampaignConfig& c) {
  nlohmann::json j;
  j["family"] = family_name(c.family);
  j["d"] = c.d_list;
  j["n_per_class"] = c.n_per_class_list;
  j["runs"] = c.runs;
  j["ber_range"] = {c.ber_lo, c.ber_hi};
  j["max_gap"] = c.max_gap;
  j["master_seed"] = c.master_seed;
  j["estimators"] = c.estimator_ids;
  j["profile"] = profile_name(c.profile);
  j["output_dir"] = c.output_dir;
  if (c.workers > 0) j["workers"] = c.workers;
  return j.dump(2);
}

CampaignConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CampaignConfig c;
  c.family = family_from_name(j.at("family").get<std::string>());
  c.d_list = j.at("d").get<std::vector<int>>();
  c.n_per_class_list = j.at("n_per_class").get<std::vector<int>>();
  if (j.contains("runs")) c.runs = j.at("runs").get<int>();
  if (j.contains("ber_range")) {
    const auto range = j.at("ber_range").get<std::vector<double>>();
    if (range.size() != 2)
      throw std::invalid_argument("config: ber_range must have two values");
    c.ber_lo = range[0];
    c.ber_hi = range[1];
  }
  if (j.contains("max_gap")) c.max_gap = j.at("max_gap").get<double>();
  if (j.contains("master_seed"))
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("estimators"))
    c.estimator_ids = j.at("estimators").get<std::vector<std::string>>();
  if (j.contains("profile"))
    c.profile = profile_from_name(j.at("profile").get<std::string>());
  if (j.contains("output_dir"))
    c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("workers")) c.workers = j.at("workers").get<int>();

  if (c.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (!(0.0 < c.ber_lo && c.ber_lo < c.ber_hi && c.ber_hi < 0.5))
    throw std::invalid_argument("config: ber_range must lie inside (0, 0.5)");
  for (const auto& id : c.estimator_ids)
    if (!is_known_estimator(id))
      throw std::invalid_argument("config: unknown estimator id: " + id);
  return c;
}

std::vector<PlanItem> plan_campaign(const CampaignConfig& config,
                                    const CalibratedParameterTable& table) {
  if (table.entries.empty())
    throw std::invalid_argument("plan_campaign: empty table");
  if (table.min_ber() > config.ber_lo || table.max_ber() < config.ber_hi)
    throw std::invalid_argument(
        "plan_campaign: table does not cover the configured BER range");

  const auto selected = select_uniform(table, config.runs);
  const auto targets =
      stratified_targets(table.min_ber(), table.max_ber(), config.runs);

  std::vector<PlanItem> plan;
  plan.reserve(selected.size());
  for (int run = 0; run < config.runs; ++run) {
    PlanItem item;
    item.entry = selected[static_cast<std::size_t>(run)];
    item.target_ber = targets[static_cast<std::size_t>(run)];
    item.run_id = run;
    item.run_seed = derive_run_seed(config.master_seed,
                                    static_cast<std::uint64_t>(run));
    plan.push_back(item);
  }
  return plan;
}

EstimateRecord run_simulation(const ScenarioSpec& spec, int n_per_class,
                              std::uint64_t run_seed,
                              const std::vector<std::string>& estimator_ids,
                              double true_ber, int run_id) {
  if (n_per_class < 2)
    throw std::invalid_argument("run_simulation: n_per_class must be >= 2");

  const auto start = std::chrono::steady_clock::now();

  RngStream data = run_stream(run_seed, StreamPurpose::Data);
  LabeledDataset dataset;
  dataset.x.resize(2 * n_per_class, spec.d);
  dataset.x.topRows(n_per_class) = sample(spec, ClassLabel::A, n_per_class, data);
  dataset.x.bottomRows(n_per_class) =
      sample(spec, ClassLabel::B, n_per_class, data);
  dataset.labels.assign(static_cast<std::size_t>(2 * n_per_class), ClassLabel::A);
  for (int i = 0; i < n_per_class; ++i)
    dataset.labels[static_cast<std::size_t>(n_per_class + i)] = ClassLabel::B;

  EstimateRecord record;
  record.run_id = run_id;
  record.scenario_id = spec.scenario_id;
  record.seed = run_seed;
  record.d = spec.d;
  record.n_per_class = n_per_class;
  record.true_ber = true_ber;
  record.estimates = evaluate_estimators(spec, dataset, estimator_ids);
  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return record;
}

RecordWriter::RecordWriter(const std::string& path, bool append)
    : path_(path) {
  const auto mode = append ? std::ios::app : std::ios::trunc;
  std::ofstream records(path_, mode);
  if (!records) throw std::runtime_error("cannot open records file: " + path_);
  std::ofstream timings(path_ + ".timings", mode);
}

void RecordWriter::write(const EstimateRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  {
    std::ofstream out(path_, std::ios::app);
    out << record_to_json(record).dump() << "\n";
  }
  std::ofstream timings(path_ + ".timings", std::ios::app);
  nlohmann::json t;
  t["run_id"] = record.run_id;
  t["wall_ms"] = record.wall_ms;
  timings << t.dump() << "\n";
}

void RecordWriter::write_failure(int run_id, const std::string& message) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(path_ + ".failures", std::ios::app);
  nlohmann::json j;
  j["run_id"] = run_id;
  j["error"] = message;
  out << j.dump() << "\n";
}

void write_records(const std::vector<EstimateRecord>& records,
                   const std::string& path) {
  RecordWriter writer(path, false);
  for (const auto& r : records) writer.write(r);
}

ReadResult read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);

  ReadResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("schema") ||
        !j.at("schema").is_number_integer()) {
      ++result.skipped;
      continue;
    }
    if (j.at("schema").get<int>() != kSchemaVersion)
      throw std::runtime_error("records schema version mismatch in " + path);
    try {
      result.records.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception&) {
      ++result.skipped;
    }
  }

  // Merge wall times from the sidecar when present.
  std::ifstream timings(path + ".timings");
  if (timings) {
    std::map<int, double> by_run;
    while (std::getline(timings, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("run_id") || !j.contains("wall_ms"))
        continue;
      by_run[j.at("run_id").get<int>()] = j.at("wall_ms").get<double>();
    }
    for (auto& r : result.records) {
      const auto it = by_run.find(r.run_id);
      if (it != by_run.end()) r.wall_ms = it->second;
    }
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const EstimateRecord& a, const EstimateRecord& b) {
              return a.run_id < b.run_id;
            });
  return result;
}

std::string records_file_name(Family family, int d, int n_per_class) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "records_%s_d%d_n%d.ndjson",
                family_name(family), d, n_per_class);
  return buf;
}

std::vector<CellResult> run_campaign(const CampaignConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const int workers =
      config.workers > 0 ? config.workers : default_worker_count();

  std::vector<CellResult> results;
  for (int d : config.d_list) {
    // Calibration is cached per (family, d, range, seed, profile).
    const fs::path cache =
        fs::path(config.output_dir) /
        table_cache_name(config.family, d, config.ber_lo, config.ber_hi,
                         config.master_seed, config.profile);
    CalibratedParameterTable table;
    if (fs::exists(cache)) {
      std::ifstream in(cache);
      std::stringstream buf;
      buf << in.rdbuf();
      table = table_from_json(buf.str());
    } else {
      CalibrationOptions opts;
      opts.profile = config.profile;
      opts.workers = workers;
      RngStream rng = derive_stream(config.master_seed,
                                    static_cast<std::uint64_t>(d),
                                    StreamPurpose::Calibration);
      table = calibrate(config.family, d, config.ber_lo, config.ber_hi,
                        config.max_gap, rng, opts);
      std::ofstream out(cache);
      out << table_to_json(table);
    }

    const auto plan = plan_campaign(config, table);

    for (int n : config.n_per_class_list) {
      CellResult cell;
      cell.d = d;
      cell.n_per_class = n;
      const fs::path path = fs::path(config.output_dir) /
                            records_file_name(config.family, d, n);
      cell.records_path = path.string();

      std::set<int> done;
      if (fs::exists(path)) {
        for (const auto& r : read_records(path.string()).records)
          done.insert(r.run_id);
      }
      RecordWriter writer(path.string(), /*append=*/true);

      std::vector<const PlanItem*> pending;
      for (const auto& item : plan)
        if (!done.count(item.run_id)) pending.push_back(&item);
      cell.skipped_existing = static_cast<int>(plan.size() - pending.size());

      std::atomic<int> completed{0};
      std::atomic<int> failed{0};
      parallel_for(pending.size(), workers, [&](std::size_t i) {
        const PlanItem& item = *pending[i];
        try {
          const EstimateRecord record =
              run_simulation(item.entry->spec, n, item.run_seed,
                             config.estimator_ids, item.entry->ber,
                             item.run_id);
          writer.write(record);
          ++completed;
        } catch (const std::exception& e) {
          writer.write_failure(item.run_id, e.what());
          ++failed;
        }
      });
      cell.completed = completed.load();
      cell.failed = failed.load();
      results.push_back(cell);
    }
  }
  return results;
}

}  // namespace berest
