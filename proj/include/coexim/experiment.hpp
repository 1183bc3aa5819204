#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "coexim/simulator.hpp"

// Experiment front end: strict JSON config ingestion, seeded sweep execution,
// analytic-vs-simulation overlay, and CSV/manifest emission.
namespace coexim::exp {

inline constexpr const char* kToolName = "coexim";
inline constexpr const char* kToolVersion = "0.1.0";

// Strict parser: unknown keys are rejected with a nearest-key suggestion,
// semantic violations are reported all at once.
sim::SimConfig parse_sim_config(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const sim::SimConfig& cfg);

struct SweepAxis {
  std::string path;  // dotted path into the config, e.g. "sensor.count_per_apartment"
  std::vector<nlohmann::json> values;
};

struct OutputSelection {
  bool kpi_table = true;
  bool summary = true;
  bool long_format = false;
  bool bandit_trajectories = false;
};

struct ExperimentSpec {
  nlohmann::json raw;          // spec as loaded (round-trips through emit)
  nlohmann::json base_config;  // base SimConfig as JSON
  std::vector<SweepAxis> axes;
  int replications = 1;
  std::uint64_t seed_base = 1;
  OutputSelection outputs;
  bool overlay_analytic = false;
};

ExperimentSpec parse_spec(const nlohmann::json& j);
// Reads and parses a spec file; parse errors carry file:line:column.
ExperimentSpec load_spec(const std::string& path);

struct AnalyticOverlay {
  double p_suc = 1.0;
  double expected_delay_s = 0.0;
  double outage = 0.0;
  double lifetime_days = 0.0;
  double capacity = 0.0;
};

// Maps a simulator config onto a TrafficProfile for the closed-form engine:
// device-mean arrival rate, sensor airtime, per-apartment tier-1 co-slot
// neighbor classes derived from the subframe assignment.
analytics::TrafficProfile base_profile(const sim::SimConfig& cfg);
AnalyticOverlay analytic_overlay(const sim::SimConfig& cfg);

struct SweepRow {
  int point_index = 0;
  std::vector<nlohmann::json> axis_values;
  int replication = 0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty: the run failed, other rows proceed
  sim::KpiReport report;
  std::optional<AnalyticOverlay> overlay;
};

struct SweepResult {
  std::vector<std::string> axis_paths;
  std::vector<SweepRow> rows;  // ordered by (point_index, replication)
};

// Replication r of every sweep point runs with seed_base + r (common random
// numbers across points). `jobs` > 1 runs points concurrently; the result
// ordering and contents are independent of jobs.
SweepResult run_sweep(const ExperimentSpec& spec, int jobs = 1);

// Writes <prefix>results.csv, <prefix>manifest.json and <prefix>spec.json,
// plus summary/long/bandit CSVs per the spec's output selection. Fails before
// writing anything if any target cannot be opened. Byte-identical for
// identical spec and seeds.
void emit(const ExperimentSpec& spec, const SweepResult& result, const std::string& out_prefix);

nlohmann::json report_to_json(const sim::KpiReport& r);
void write_packet_trace_csv(const sim::KpiReport& r, const std::string& path);

// FNV-1a 64 over the canonical (sorted-key) dump.
std::string config_hash(const nlohmann::json& j);

}  // namespace coexim::exp
