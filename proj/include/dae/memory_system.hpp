#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dae/machine.hpp"

namespace dae {

// ---------------------------------------------------------------------------
// Timing semantics (normative; the event-driven engine and the cycle oracle
// both implement exactly these rules):
//
//  * Cores tick on fixed grids anchored at t=0; cycle k of a core spans
//    [k*period, (k+1)*period) fs. Every instruction issues at a cycle start.
//  * A memory access evaluated at issue time t returns the time the data is
//    ready; the requesting core's next dependent activity happens at its first
//    cycle start >= ready.
//  * Lookup order: local L1 -> local L2 -> in-flight merge -> remote L2
//    (coherence) -> memory. L1/L2 hits update LRU and fill upward instantly.
//    Coherence and memory fills install into local L1+L2 when the line
//    *arrives* (ready time), not at issue.
//  * Remote probes never change the remote cluster's LRU state and never
//    invalidate the remote copy (read sharing).
//  * Stores are write-allocate/write-back and never stall the core beyond the
//    L1 lookup: latency is always the L1 hit time; the line is installed
//    immediately. Stores do not occupy miss slots.
//  * Prefetch hints: no-op when the line is resident or already in flight;
//    dropped when the cluster's prefetch queue is full; otherwise the line
//    arrives exactly coherence/memory latency after issue. The issuing core
//    never stalls on a prefetch.
//  * Pending arrivals are installed in (arrival time, issue order) order, and
//    always before any core activity at the same instant.
// ---------------------------------------------------------------------------

enum class Source { L1, LocalL2, RemoteCluster, Memory };

const char* source_name(Source s);

struct AccessCounts {
  int64_t l1 = 0;
  int64_t l2 = 0;
  int64_t remote = 0;
  int64_t memory = 0;

  void add(Source s, int64_t n = 1);
  int64_t total() const { return l1 + l2 + remote + memory; }
  AccessCounts& operator+=(const AccessCounts& o);
};

struct PrefetchStats {
  int64_t enqueued = 0;  // new in-flight entries
  int64_t deduped = 0;   // resident or already in flight
  int64_t dropped = 0;   // queue full
  PrefetchStats& operator+=(const PrefetchStats& o);
};

struct ServiceResult {
  Source source;
  TimeFs ready;  // absolute fs time the data is available
};

// Deduped is an Enqueued no-op (line resident or already in flight); it is
// kept distinct so coverage statistics can tell the cases apart.
enum class PrefetchOutcome { Enqueued, Deduped, Dropped };

// Set-associative LRU array of line tags.
class CacheArray {
 public:
  CacheArray(int64_t size_bytes, int32_t assoc, int32_t line_bytes);

  bool probe_touch(uint64_t line);     // hit -> make MRU
  bool contains(uint64_t line) const;  // no LRU update
  void insert(uint64_t line);          // install as MRU (touch when present)

  int64_t sets() const { return sets_; }
  int32_t ways() const { return assoc_; }

 private:
  static constexpr uint64_t kEmpty = std::numeric_limits<uint64_t>::max();
  int32_t assoc_;
  int64_t sets_;
  std::vector<uint64_t> tags_;  // sets_ x assoc_, each set kept in MRU..LRU order

  uint64_t* set_for(uint64_t line) { return &tags_[(line % static_cast<uint64_t>(sets_)) * assoc_]; }
  const uint64_t* set_for(uint64_t line) const {
    return &tags_[(line % static_cast<uint64_t>(sets_)) * assoc_];
  }
};

class MemorySystem {
 public:
  explicit MemorySystem(const MachineConfig& cfg);

  // Install every pending arrival with arrival time <= now.
  void apply_arrivals(TimeFs now);
  TimeFs next_arrival() const { return next_arrival_; }  // kNever when nothing in flight

  ServiceResult access(ClusterId c, uint64_t addr, bool is_store, TimeFs now);
  PrefetchOutcome issue_prefetch(ClusterId c, uint64_t addr, TimeFs now);

  bool line_resident(ClusterId c, uint64_t addr) const;

  const PrefetchStats& prefetch_stats(ClusterId c) const { return stats_[idx(c)]; }

  static constexpr TimeFs kNever = std::numeric_limits<TimeFs>::max();

 private:
  struct Inflight {
    uint64_t line;
    TimeFs arrival;
    Source source;
    bool is_prefetch;
    uint64_t seq;
  };

  struct ClusterState {
    CacheArray l1;
    CacheArray l2;
    std::vector<Inflight> inflight;
    ClusterState(const ClusterConfig& c, int32_t line_bytes);
  };

  static size_t idx(ClusterId c) { return static_cast<size_t>(c); }
  ClusterId other(ClusterId c) const {
    return c == ClusterId::Big ? ClusterId::Little : ClusterId::Big;
  }
  const Inflight* find_inflight(ClusterId c, uint64_t line) const;
  int32_t prefetches_in_flight(ClusterId c) const;

  void recompute_next_arrival();

  MachineConfig cfg_;
  std::vector<ClusterState> clusters_;
  PrefetchStats stats_[2];
  uint64_t next_seq_ = 0;
  TimeFs next_arrival_ = kNever;
};

}  // namespace dae
