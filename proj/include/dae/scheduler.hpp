#pragma once

#include "dae/timeline.hpp"
#include "dae/transform.hpp"

namespace dae {

enum class SyncVariant { Coupled, LockStep, Timed, Hybrid };

const char* sync_variant_name(SyncVariant v);
SyncVariant sync_variant_from_name(const std::string& name);

struct SyncPolicy {
  SyncVariant variant = SyncVariant::LockStep;
  // Timed / Hybrid inner-timed parameters.
  int64_t sleep_access_ns = 0;   // Access sleeps this long after each slice
  int64_t sleep_execute_ns = 0;  // Execute sleeps this long before each slice
  double jitter_stddev_ns = 0;
  uint64_t rng_seed = 0;
  // Hybrid: a locking barrier every resync_period_slices slices.
  int64_t resync_period_slices = 1;
  // Overlap optimization: Execute's grant fires once this fraction of the
  // slice's prefetches has been issued. 1.0 reproduces plain LockStep.
  double lead_fraction = 1.0;

  static SyncPolicy coupled() { return {SyncVariant::Coupled}; }
  static SyncPolicy lockstep() { return {SyncVariant::LockStep}; }
  static SyncPolicy timed(int64_t acc_ns, int64_t exe_ns, double jitter_ns = 0, uint64_t seed = 0) {
    SyncPolicy p{SyncVariant::Timed};
    p.sleep_access_ns = acc_ns;
    p.sleep_execute_ns = exe_ns;
    p.jitter_stddev_ns = jitter_ns;
    p.rng_seed = seed;
    return p;
  }
  static SyncPolicy hybrid(int64_t period, int64_t acc_ns, int64_t exe_ns, double jitter_ns = 0,
                           uint64_t seed = 0) {
    SyncPolicy p = timed(acc_ns, exe_ns, jitter_ns, seed);
    p.variant = SyncVariant::Hybrid;
    p.resync_period_slices = period;
    return p;
  }

  void validate() const;
};

// Returns a copy of the policy with the overlap handshake enabled.
// Only LockStep and Hybrid support it.
SyncPolicy set_overlap(const SyncPolicy& policy, double lead_fraction);

struct ThreadModel {
  enum class Kind { SpawnPerInvocation, Pool } kind = Kind::SpawnPerInvocation;
  int64_t cost_override_ns = -1;  // -1: take spawn_join_ns / signal_ns from the machine

  static ThreadModel spawn() { return {Kind::SpawnPerInvocation, -1}; }
  static ThreadModel pool() { return {Kind::Pool, -1}; }
};

struct RunResult {
  Timeline timeline;
  std::vector<SliceCycles> per_slice;  // inner-loop cycles, oracle comparison unit
  SliceStats access_total;
  SliceStats execute_total;  // baseline totals live here for coupled runs
  int64_t slices_per_invocation = 0;
  int64_t total_slices = 0;  // slices_per_invocation * invocations
};

// Baseline: the chunked but untransformed kernel on the big core alone,
// cold caches, no synchronization, no thread costs.
RunResult run_coupled(const ChunkedKernel& kernel, const MachineConfig& machine);

// Access on LITTLE, Execute on big, under the given synchronization policy.
RunResult run_dae(const PhasePair& pair, const MachineConfig& machine, const SyncPolicy& sync,
                  const ThreadModel& threads);

struct SweepEntry {
  int64_t granularity;
  RunResult run;
};

struct SweepResult {
  RunResult baseline;  // coupled run at g = N
  std::vector<SweepEntry> entries;
};

SweepResult sweep_granularity(const ValidatedKernel& kernel, const MachineConfig& machine,
                              const std::vector<int64_t>& granularities, const SyncPolicy& sync,
                              const ThreadModel& threads);

}  // namespace dae
