#pragma once

#include <string>
#include <vector>

#include "dae/metrics.hpp"
#include "dae/presets.hpp"

namespace dae {

// One row per (kernel, granularity, policy); column set is frozen so plotting
// scripts can rely on it.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& kernel, int64_t n, int64_t invocations,
                            int64_t granularity, const SyncPolicy& sync, const ThreadModel& threads,
                            uint64_t seed, const RunMetrics& m);

struct ScenarioConfig {
  std::string kernel_ref;  // preset name or kernel file path
  int64_t n_override = 0;
  int64_t invocations_override = 0;
  std::string machine_path;        // empty: built-in defaults
  std::vector<int64_t> granularities;  // empty: preset default sweep
  SyncPolicy sync = SyncPolicy::lockstep();
  bool threads_set = false;
  ThreadModel threads;  // preset default unless threads_set
  std::string out_dir = ".";
  std::string name;  // output file prefix; defaults to the kernel name
  uint64_t seed = 0;
  bool quantized_counters = false;
};

ScenarioConfig load_scenario_file(const std::string& path);

struct ScenarioOutput {
  std::string csv_path;
  std::string summary_path;
  std::vector<std::string> timeline_paths;
  int64_t best_granularity = 0;
  double best_ipc_speedup = 0;
};

// Runs the sweep and writes CSV + per-granularity timeline JSON + a summary.
ScenarioOutput run_scenario(const ScenarioConfig& cfg);

// Loads kernel + machine + sweep for a scenario without running it.
struct ResolvedScenario {
  PresetInfo preset;           // kernel + defaults (kernel may come from file)
  MachineConfig machine;
  std::vector<int64_t> granularities;
  ThreadModel threads;
};
ResolvedScenario resolve_scenario(const ScenarioConfig& cfg);

struct PolicyComparison {
  std::string policy;
  RunMetrics metrics;
};

// Coupled baseline vs LockStep vs Timed (sleeps derived from the LockStep
// run) vs Hybrid on identical inputs.
std::vector<PolicyComparison> compare_policies(const ValidatedKernel& kernel,
                                               const MachineConfig& machine, int64_t granularity,
                                               const ThreadModel& threads, uint64_t seed,
                                               int64_t hybrid_period = 8);

std::string policy_table_text(const std::vector<PolicyComparison>& rows);

}  // namespace dae
