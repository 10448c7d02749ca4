#pragma once

#include <deque>
#include <vector>

#include "dae/kernel_ir.hpp"
#include "dae/memory_system.hpp"

namespace dae {

// One executed instruction instance inside a slice (predicates resolved,
// addresses evaluated). deps index earlier ops of the same iteration.
struct SliceOp {
  const Instr* ins;
  int64_t iteration;
  uint64_t addr = 0;
  int32_t first_dep = 0;  // range into SliceOps::deps
  int32_t dep_count = 0;
  int32_t first_consumer = 0;  // range into SliceOps::consumers
  int32_t consumer_count = 0;
};

struct SliceOps {
  std::vector<SliceOp> ops;
  std::vector<int32_t> deps;       // dedup'd producer op indices
  std::vector<int32_t> consumers;  // forward adjacency, same encoding
  int64_t prefetch_count = 0;

  void clear() {
    ops.clear();
    deps.clear();
    consumers.clear();
    prefetch_count = 0;
  }
};

// Expands iterations [begin, end) of a phase kernel into the op stream.
void expand_slice(const ValidatedKernel& kernel, int64_t begin, int64_t end, SliceOps* out);

struct SliceStats {
  int64_t cycles = 0;
  int64_t retired = 0;
  int64_t stall_cycles = 0;
  AccessCounts counts;
  PrefetchStats prefetch;

  SliceStats& operator+=(const SliceStats& o) {
    cycles += o.cycles;
    retired += o.retired;
    stall_cycles += o.stall_cycles;
    counts += o.counts;
    prefetch += o.prefetch;
    return *this;
  }
};

// Incremental core models. The driving loop must apply memory-system arrivals
// up to next_time() before each advance() call; both engines and the oracle
// rely on that ordering.
class CoreRunner {
 public:
  CoreRunner(const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms);
  virtual ~CoreRunner() = default;

  virtual void begin_slice(const SliceOps* ops, TimeFs start) = 0;
  virtual bool done() const = 0;
  virtual TimeFs next_time() const = 0;
  virtual void advance() = 0;
  // Grid-aligned time at which the slice is complete (valid once done()).
  virtual TimeFs end_time() const = 0;

  const SliceStats& stats() const { return stats_; }
  TimeFs period() const { return period_; }
  // Prefetch issues completed so far in the current slice (overlap trigger).
  int64_t prefetches_issued() const { return prefetches_issued_; }

 protected:
  const MachineConfig& cfg_;
  ClusterId cluster_;
  MemorySystem* ms_;
  TimeFs period_;
  TimeFs l1_fs_;
  SliceStats stats_;
  int64_t prefetches_issued_ = 0;
};

// 1 op/cycle, blocking loads, non-blocking 1-cycle prefetch issues.
class InOrderRunner : public CoreRunner {
 public:
  using CoreRunner::CoreRunner;

  void begin_slice(const SliceOps* ops, TimeFs start) override;
  bool done() const override { return idx_ >= static_cast<int64_t>(ops_->ops.size()); }
  TimeFs next_time() const override { return time_; }
  void advance() override;
  TimeFs end_time() const override { return time_; }

 private:
  const SliceOps* ops_ = nullptr;
  int64_t idx_ = 0;
  TimeFs time_ = 0;
};

// Greedy in-window scheduler: per cycle, retire up to width completed uops in
// order, dispatch up to width uops into the window, then issue up to width
// ready uops oldest-first, loads gated by mlp_degree outstanding misses.
// Results computed in one cycle are visible from the next cycle on.
class OutOfOrderRunner : public CoreRunner {
 public:
  OutOfOrderRunner(const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms);

  void begin_slice(const SliceOps* ops, TimeFs start) override;
  bool done() const override { return done_; }
  TimeFs next_time() const override { return time_; }
  void advance() override;
  TimeFs end_time() const override { return end_; }

 private:
  struct RobEntry {
    int32_t op;
    bool issued = false;
    TimeFs completion = 0;
    TimeFs blocked_until = 0;  // entry-level gate (miss-slot contention)
  };

  // Issue readiness is event-driven: when an op's last uop issues, its final
  // result time is pushed to every consumer, so the per-cycle scan only
  // compares precomputed wake times. This cannot change the schedule relative
  // to re-walking the dependency lists; it just avoids the walks.
  void finalize_op(int32_t op);
  int32_t outstanding_loads(TimeFs t) const;
  TimeFs earliest_load_completion(TimeFs t) const;

  const SliceOps* ops_ = nullptr;
  std::deque<RobEntry> rob_;
  std::vector<int32_t> uops_done_;     // issued uops per op
  std::vector<TimeFs> result_time_;    // max completion across the op's uops
  std::vector<int32_t> pending_deps_;  // producers not yet finalized
  std::vector<TimeFs> data_ready_;     // running max of finalized dep results
  std::vector<TimeFs> op_wake_;        // exact readiness time once deps finalized
  std::vector<TimeFs> load_completions_;
  int64_t dispatch_op_ = 0;  // next op to dispatch from
  int32_t dispatch_uop_ = 0;
  int32_t width_;
  int32_t mlp_;
  int32_t window_;
  TimeFs time_ = 0;
  TimeFs end_ = 0;
  bool done_ = true;
};

// Convenience entry point for tests: runs one slice in isolation, driving
// arrivals, and reports the per-slice result.
struct SliceResult {
  SliceStats stats;
  TimeFs start = 0;
  TimeFs end = 0;
};

SliceResult run_slice(const ValidatedKernel& phase, int64_t begin, int64_t end,
                      const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms,
                      TimeFs start_time);

}  // namespace dae
