#pragma once

#include "dae/scheduler.hpp"

namespace dae {

// Counter regions mirror the paper's measurement procedure: samples are taken
// strictly around the inner loop, so lock and sleep time never pollute IPC.
enum class RegionKind { InnerLoop, Phase, Whole };

struct Region {
  RegionKind kind = RegionKind::Whole;
  bool access = false;   // phase selector for InnerLoop / Phase
  int64_t slice = -1;    // global slice index for InnerLoop

  static Region inner(bool access, int64_t slice) { return {RegionKind::InnerLoop, access, slice}; }
  static Region phase(bool access) { return {RegionKind::Phase, access, -1}; }
  static Region whole() { return {RegionKind::Whole, false, -1}; }
};

struct RegionCounters {
  int64_t cycles = 0;
  int64_t retired_instructions = 0;
};

RegionCounters measure_region(const Timeline& timeline, const Region& region);

// Emulates the divided 32-bit cycle counter.
uint64_t quantize_counter(int64_t cycles, const CounterConfig& cfg);
int64_t unquantize_counter(uint64_t value, const CounterConfig& cfg);

double ipc(const RegionCounters& c);
double ipc_speedup(const RegionCounters& dae, const RegionCounters& baseline);

struct RunMetrics {
  double baseline_ipc = 0;
  double execute_ipc = 0;
  double ipc_speedup = 0;
  double baseline_runtime_ns = 0;
  double total_runtime_ns = 0;
  double slowdown = 0;
  double access_ns = 0;
  double execute_ns = 0;
  double sync_ns = 0;
  double thread_ns = 0;
  double sleep_ns = 0;
  double lock_wait_ns = 0;
  double idle_ns = 0;  // wall minus the four accounted components
  double little_time_fraction = 0;
  AccessCounts execute_sources;
  AccessCounts access_sources;
  PrefetchStats prefetch;
  double energy_mj = 0;
  double edp_mj_s = 0;
  double baseline_energy_mj = 0;
  double baseline_edp_mj_s = 0;
  double instruction_overhead = 0;  // filled by callers that hold the PhasePair
};

// Energy/EDP for one run: active power while a core is busy, idle power for
// the rest of the wall clock.
struct EnergyResult {
  double energy_mj;
  double edp_mj_s;
};
EnergyResult energy_edp(const Timeline& timeline, const PowerConfig& power);

// Assembles the full report row for a DAE run against its coupled baseline.
// quantized: reconstruct per-slice cycles through the divided counter first.
RunMetrics compute_metrics(const RunResult& dae, const RunResult& baseline,
                           const MachineConfig& machine, bool quantized = false);

}  // namespace dae
