#pragma once

#include <string>
#include <vector>

#include "dae/core_model.hpp"
#include "dae/machine.hpp"

namespace dae {

enum class IntervalTag {
  AccessInner,
  AccessOuter,
  ExecuteInner,
  ExecuteOuter,
  LockOp,
  LockWait,
  Sleep,
  Spawn,
  Signal,
};

const char* interval_tag_name(IntervalTag tag);

// CPU-busy tags contribute to active time (energy) and to the LITTLE-time
// fraction; waits and sleeps count as idle.
bool interval_tag_busy(IntervalTag tag);

struct Interval {
  ClusterId core;
  IntervalTag tag;
  TimeFs begin = 0;
  TimeFs end = 0;
  int64_t slice = -1;  // global slice index (invocation * slice_count + s)
  SliceStats stats;    // populated for inner/outer intervals
};

struct Timeline {
  std::vector<Interval> intervals;
  TimeFs end_time = 0;

  TimeFs busy_fs(ClusterId c) const;
  TimeFs tag_fs(IntervalTag tag) const;  // both cores

  // Event-log dump (JSON lines) for breakdown plotting and oracle diffing.
  std::string to_json() const;
};

// Per-slice inner-loop cycle counts, the unit of oracle comparison.
struct SliceCycles {
  bool access;        // false = execute/baseline phase
  int64_t slice;      // global slice index
  int64_t cycles;
  int64_t retired;
};

}  // namespace dae
