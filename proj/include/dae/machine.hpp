#pragma once

#include <string>

#include "dae/support.hpp"

namespace dae {

enum class ClusterId { Big = 0, Little = 1 };
inline const char* cluster_name(ClusterId c) { return c == ClusterId::Big ? "big" : "little"; }

enum class CoreKind { InOrder, OutOfOrder };

struct CacheConfig {
  int64_t size_bytes = 0;
  int32_t assoc = 0;
  int64_t hit_ns = 0;
};

struct CoreConfig {
  CoreKind kind = CoreKind::InOrder;
  int32_t frequency_mhz = 0;
  int32_t min_frequency_mhz = 200;
  int32_t max_frequency_mhz = 0;
  int32_t issue_width = 1;   // InOrder fixed at 1
  int32_t mlp_degree = 1;    // max outstanding loads; InOrder fixed at 1
  int32_t window = 1;        // reorder window in micro-ops (OutOfOrder)

  TimeFs period_fs() const { return period_fs_from_mhz(frequency_mhz); }
};

struct ClusterConfig {
  CoreConfig core;
  CacheConfig l1d;
  CacheConfig l2;
  int32_t prefetch_queue_depth = 4;
};

struct MemorySystemConfig {
  int64_t coherence_ns = 35;  // remote-cluster L2 service
  int64_t memory_ns = 95;     // DRAM service
  int32_t line_bytes = 64;
};

struct SyncCostConfig {
  int64_t lock_ns = 1500;        // one lock operation round-trip
  int64_t spawn_join_ns = 30000; // per-invocation spawn+join pair
  int64_t signal_ns = 200;       // per-invocation pool wakeup
  int32_t loop_overhead_ops = 2; // outer-loop bookkeeping ops per slice
};

struct PowerConfig {
  double big_active_mw = 1600;
  double big_idle_mw = 80;
  double little_active_mw = 400;
  double little_idle_mw = 20;
};

struct CounterConfig {
  int32_t cycle_divider = 64;
  int32_t counter_width_bits = 32;
};

struct MachineConfig {
  ClusterConfig big;
  ClusterConfig little;
  MemorySystemConfig mem;
  SyncCostConfig costs;
  PowerConfig power;
  CounterConfig counters;

  const ClusterConfig& cluster(ClusterId c) const {
    return c == ClusterId::Big ? big : little;
  }

  void validate() const;
};

// Exynos 5422-flavoured defaults (A15+A7 clusters; see configs/default_machine.cfg).
MachineConfig default_machine();

MachineConfig load_machine_file(const std::string& path);
MachineConfig parse_machine_text(const std::string& text, const std::string& origin = "<string>");
std::string machine_to_text(const MachineConfig& m);

}  // namespace dae
