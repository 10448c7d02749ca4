#pragma once

#include "dae/metrics.hpp"
#include "dae/scheduler.hpp"

namespace dae {

// Brute-force reference simulator: advances both cores one cycle at a time
// with explicit per-cycle cache, queue and lock state. Independent of the
// event-driven engine; the two must agree on per-slice cycle counts exactly.
// Limited to small kernels by construction.
inline constexpr int64_t kOracleMaxIterations = 4096;

struct OracleResult {
  Timeline timeline;  // inner-loop intervals only
  std::vector<SliceCycles> per_slice;
  TimeFs end_time = 0;
};

OracleResult run_oracle(const ValidatedKernel& kernel, const MachineConfig& machine,
                        const SyncPolicy& sync, const ThreadModel& threads, int64_t granularity);

// Compares engine and oracle per-slice cycle counts for one configuration.
// Returns a human-readable description of the first mismatch, empty on match.
std::string oracle_diff(const ValidatedKernel& kernel, const MachineConfig& machine,
                        const SyncPolicy& sync, const ThreadModel& threads, int64_t granularity);

}  // namespace dae
