#include "dae/memory_system.hpp"

#include <algorithm>

namespace dae {

const char* source_name(Source s) {
  switch (s) {
    case Source::L1: return "L1";
    case Source::LocalL2: return "LocalL2";
    case Source::RemoteCluster: return "RemoteCluster";
    case Source::Memory: return "Memory";
  }
  return "?";
}

void AccessCounts::add(Source s, int64_t n) {
  switch (s) {
    case Source::L1: l1 += n; break;
    case Source::LocalL2: l2 += n; break;
    case Source::RemoteCluster: remote += n; break;
    case Source::Memory: memory += n; break;
  }
}

AccessCounts& AccessCounts::operator+=(const AccessCounts& o) {
  l1 += o.l1;
  l2 += o.l2;
  remote += o.remote;
  memory += o.memory;
  return *this;
}

PrefetchStats& PrefetchStats::operator+=(const PrefetchStats& o) {
  enqueued += o.enqueued;
  deduped += o.deduped;
  dropped += o.dropped;
  return *this;
}

CacheArray::CacheArray(int64_t size_bytes, int32_t assoc, int32_t line_bytes)
    : assoc_(assoc), sets_(size_bytes / (static_cast<int64_t>(assoc) * line_bytes)) {
  if (sets_ < 1 || assoc_ < 1)
    fail(ErrCode::ConfigError, "cache geometry: size must cover at least one set");
  tags_.assign(static_cast<size_t>(sets_) * assoc_, kEmpty);
}

bool CacheArray::probe_touch(uint64_t line) {
  uint64_t* set = set_for(line);
  for (int32_t w = 0; w < assoc_; ++w) {
    if (set[w] == line) {
      // rotate to MRU
      for (int32_t k = w; k > 0; --k) set[k] = set[k - 1];
      set[0] = line;
      return true;
    }
  }
  return false;
}

bool CacheArray::contains(uint64_t line) const {
  const uint64_t* set = set_for(line);
  for (int32_t w = 0; w < assoc_; ++w)
    if (set[w] == line) return true;
  return false;
}

void CacheArray::insert(uint64_t line) {
  if (probe_touch(line)) return;
  uint64_t* set = set_for(line);
  for (int32_t k = assoc_ - 1; k > 0; --k) set[k] = set[k - 1];
  set[0] = line;  // LRU way fell off the end
}

MemorySystem::ClusterState::ClusterState(const ClusterConfig& c, int32_t line_bytes)
    : l1(c.l1d.size_bytes, c.l1d.assoc, line_bytes),
      l2(c.l2.size_bytes, c.l2.assoc, line_bytes) {}

MemorySystem::MemorySystem(const MachineConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  clusters_.emplace_back(cfg_.big, cfg_.mem.line_bytes);
  clusters_.emplace_back(cfg_.little, cfg_.mem.line_bytes);
}

const MemorySystem::Inflight* MemorySystem::find_inflight(ClusterId c, uint64_t line) const {
  for (const Inflight& f : clusters_[idx(c)].inflight)
    if (f.line == line) return &f;
  return nullptr;
}

int32_t MemorySystem::prefetches_in_flight(ClusterId c) const {
  int32_t n = 0;
  for (const Inflight& f : clusters_[idx(c)].inflight) n += f.is_prefetch ? 1 : 0;
  return n;
}

void MemorySystem::apply_arrivals(TimeFs now) {
  if (next_arrival_ > now) return;
  // Gather due arrivals from both clusters and install them in global
  // (arrival, issue order) order so eviction sequences are deterministic.
  struct Due {
    ClusterId cluster;
    Inflight entry;
  };
  std::vector<Due> due;
  for (ClusterId c : {ClusterId::Big, ClusterId::Little}) {
    auto& fl = clusters_[idx(c)].inflight;
    for (auto it = fl.begin(); it != fl.end();) {
      if (it->arrival <= now) {
        due.push_back({c, *it});
        it = fl.erase(it);
      } else {
        ++it;
      }
    }
  }
  std::sort(due.begin(), due.end(), [](const Due& a, const Due& b) {
    if (a.entry.arrival != b.entry.arrival) return a.entry.arrival < b.entry.arrival;
    return a.entry.seq < b.entry.seq;
  });
  for (const Due& d : due) {
    clusters_[idx(d.cluster)].l1.insert(d.entry.line);
    clusters_[idx(d.cluster)].l2.insert(d.entry.line);
  }
  recompute_next_arrival();
}

void MemorySystem::recompute_next_arrival() {
  next_arrival_ = kNever;
  for (const auto& cl : clusters_)
    for (const Inflight& f : cl.inflight) next_arrival_ = std::min(next_arrival_, f.arrival);
}

ServiceResult MemorySystem::access(ClusterId c, uint64_t addr, bool is_store, TimeFs now) {
  const uint64_t line = addr / static_cast<uint64_t>(cfg_.mem.line_bytes);
  ClusterState& local = clusters_[idx(c)];
  ClusterState& remote = clusters_[idx(other(c))];
  const int32_t mhz = cfg_.cluster(c).core.frequency_mhz;
  (void)mhz;

  const TimeFs l1_ready = now + fs_from_ns(cfg_.cluster(c).l1d.hit_ns);

  if (is_store) {
    // Histogram source reflects where the line was found; the core only ever
    // pays the allocate lookup.
    Source src;
    if (local.l1.probe_touch(line)) {
      src = Source::L1;
    } else if (local.l2.probe_touch(line)) {
      src = Source::LocalL2;
    } else if (find_inflight(c, line) != nullptr) {
      src = find_inflight(c, line)->source;
    } else if (remote.l2.contains(line)) {
      src = Source::RemoteCluster;
    } else {
      src = Source::Memory;
    }
    local.l1.insert(line);
    local.l2.insert(line);
    return {src, l1_ready};
  }

  if (local.l1.probe_touch(line)) return {Source::L1, l1_ready};
  if (local.l2.probe_touch(line)) {
    local.l1.insert(line);
    return {Source::LocalL2, now + fs_from_ns(cfg_.cluster(c).l2.hit_ns)};
  }
  if (const Inflight* f = find_inflight(c, line)) {
    // Merge with the pending fill: stall only for the residual time.
    return {f->source, f->arrival};
  }
  if (remote.l2.contains(line)) {
    TimeFs ready = now + fs_from_ns(cfg_.mem.coherence_ns);
    local.inflight.push_back({line, ready, Source::RemoteCluster, false, next_seq_++});
    next_arrival_ = std::min(next_arrival_, ready);
    return {Source::RemoteCluster, ready};
  }
  TimeFs ready = now + fs_from_ns(cfg_.mem.memory_ns);
  local.inflight.push_back({line, ready, Source::Memory, false, next_seq_++});
  next_arrival_ = std::min(next_arrival_, ready);
  return {Source::Memory, ready};
}

PrefetchOutcome MemorySystem::issue_prefetch(ClusterId c, uint64_t addr, TimeFs now) {
  const uint64_t line = addr / static_cast<uint64_t>(cfg_.mem.line_bytes);
  ClusterState& local = clusters_[idx(c)];
  // Residency probes must not disturb LRU order (prefetch neutrality).
  if (local.l1.contains(line) || local.l2.contains(line) || find_inflight(c, line) != nullptr) {
    stats_[idx(c)].deduped++;
    return PrefetchOutcome::Deduped;
  }
  if (prefetches_in_flight(c) >= cfg_.cluster(c).prefetch_queue_depth) {
    stats_[idx(c)].dropped++;
    return PrefetchOutcome::Dropped;
  }
  const bool remote_hit = clusters_[idx(other(c))].l2.contains(line);
  const TimeFs ready =
      now + fs_from_ns(remote_hit ? cfg_.mem.coherence_ns : cfg_.mem.memory_ns);
  local.inflight.push_back(
      {line, ready, remote_hit ? Source::RemoteCluster : Source::Memory, true, next_seq_++});
  next_arrival_ = std::min(next_arrival_, ready);
  stats_[idx(c)].enqueued++;
  return PrefetchOutcome::Enqueued;
}

bool MemorySystem::line_resident(ClusterId c, uint64_t addr) const {
  const uint64_t line = addr / static_cast<uint64_t>(cfg_.mem.line_bytes);
  return clusters_[idx(c)].l1.contains(line) || clusters_[idx(c)].l2.contains(line);
}

}  // namespace dae
