#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "berest/estimators.hpp"
#include "berest/ground_truth.hpp"
#include "berest/scenario.hpp"

namespace berest {

struct CampaignConfig {
  Family family = Family::GvG;
  std::vector<int> d_list = {2};
  std::vector<int> n_per_class_list = {1000};
  int runs = 2500;
  double ber_lo = 0.01;
  double ber_hi = 0.49;
  double max_gap = 0.01;
  std::uint64_t master_seed = 1;
  std::vector<std::string> estimator_ids = all_estimator_ids();
  McProfile profile = McProfile::reference();
  std::string output_dir = "campaign_out";
  int workers = 0;  // 0 = default_worker_count()
};

std::string config_to_json(const CampaignConfig& config);
CampaignConfig config_from_json(const std::string& text);

struct PlanItem {
  const GroundTruthEntry* entry = nullptr;  // borrowed from the table
  double target_ber = 0.0;                  // stratification target
  int run_id = 0;
  std::uint64_t run_seed = 0;
};

/// Deterministic simulation plan: uniform BER targets over the table's
/// covered range, nearest table entry per target, one derived seed per run.
/// A pure function of (config, table).
std::vector<PlanItem> plan_campaign(const CampaignConfig& config,
                                    const CalibratedParameterTable& table);

struct EstimateRecord {
  int run_id = 0;
  std::string scenario_id;
  std::uint64_t seed = 0;
  int d = 0;
  int n_per_class = 0;
  double true_ber = 0.0;
  std::map<std::string, double> estimates;
  double wall_ms = 0.0;

  bool operator==(const EstimateRecord& other) const {
    return run_id == other.run_id && scenario_id == other.scenario_id &&
           seed == other.seed && d == other.d &&
           n_per_class == other.n_per_class && true_ber == other.true_ber &&
           estimates == other.estimates && wall_ms == other.wall_ms;
  }
};

/// Run every configured estimator on one freshly sampled dataset (equal
/// class counts, no preprocessing). Any estimator failure propagates; there
/// are no partial records.
EstimateRecord run_simulation(const ScenarioSpec& spec, int n_per_class,
                              std::uint64_t run_seed,
                              const std::vector<std::string>& estimator_ids,
                              double true_ber, int run_id = 0);

/// Records persist as newline-delimited JSON. Wall times live in a
/// `<path>.timings` sidecar so the records file itself is a pure function of
/// (config, table) and stays byte-comparable across executions.
void write_records(const std::vector<EstimateRecord>& records,
                   const std::string& path);

struct ReadResult {
  std::vector<EstimateRecord> records;  // sorted by run id
  int skipped = 0;                      // corrupt or partial rows
};

ReadResult read_records(const std::string& path);

/// Serialized appender used by the campaign worker pool; also keeps the
/// failure sidecar (`<path>.failures`) so dropped runs stay auditable.
class RecordWriter {
 public:
  RecordWriter(const std::string& path, bool append);
  void write(const EstimateRecord& record);
  void write_failure(int run_id, const std::string& message);

 private:
  std::string path_;
  std::mutex mutex_;
};

struct CellResult {
  int d = 0;
  int n_per_class = 0;
  std::string records_path;
  int completed = 0;
  int failed = 0;
  int skipped_existing = 0;
};

/// Full campaign: per dimension, load or build the calibration table
/// (cached under the output directory), then per n run the planned
/// simulations on a worker pool. Rerunning resumes by skipping run ids
/// already present in each records file.
std::vector<CellResult> run_campaign(const CampaignConfig& config);

/// Records file name for one campaign cell.
std::string records_file_name(Family family, int d, int n_per_class);

}  // namespace berest
