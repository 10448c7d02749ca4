#include "dae/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

// Everything in this file re-derives the timing rules from scratch: separate
// LRU bookkeeping (timestamp-based instead of ordered ways), separate in-order
// and out-of-order state machines, and a literal one-cycle-at-a-time global
// loop. Only input semantics (kernels, configs, jitter streams) are shared
// with the engine.

namespace dae {

namespace {

constexpr TimeFs kNever = MemorySystem::kNever;

// --- independent cache model -----------------------------------------------

class StampCache {
 public:
  StampCache(int64_t size_bytes, int32_t assoc, int32_t line_bytes)
      : ways_(assoc), sets_(size_bytes / (static_cast<int64_t>(assoc) * line_bytes)) {
    lines_.resize(static_cast<size_t>(sets_));
  }

  bool touch(uint64_t line, uint64_t stamp) {
    auto& set = lines_[set_of(line)];
    auto it = set.find(line);
    if (it == set.end()) return false;
    it->second = stamp;
    return true;
  }

  bool contains(uint64_t line) const {
    const auto& set = lines_[set_of(line)];
    return set.find(line) != set.end();
  }

  void insert(uint64_t line, uint64_t stamp) {
    auto& set = lines_[set_of(line)];
    auto it = set.find(line);
    if (it != set.end()) {
      it->second = stamp;
      return;
    }
    if (static_cast<int32_t>(set.size()) == ways_) {
      auto victim = set.begin();
      for (auto c = set.begin(); c != set.end(); ++c)
        if (c->second < victim->second) victim = c;
      set.erase(victim);
    }
    set.emplace(line, stamp);
  }

 private:
  size_t set_of(uint64_t line) const { return static_cast<size_t>(line % static_cast<uint64_t>(sets_)); }
  int32_t ways_;
  int64_t sets_;
  std::vector<std::map<uint64_t, uint64_t>> lines_;
};

struct OracleInflight {
  uint64_t line;
  TimeFs arrival;
  Source source;
  bool is_prefetch;
  uint64_t seq;
};

struct OracleMemory {
  const MachineConfig& cfg;
  StampCache l1[2];
  StampCache l2[2];
  std::vector<OracleInflight> inflight[2];
  uint64_t stamp = 0;
  uint64_t seq = 0;

  explicit OracleMemory(const MachineConfig& m)
      : cfg(m),
        l1{{m.big.l1d.size_bytes, m.big.l1d.assoc, m.mem.line_bytes},
           {m.little.l1d.size_bytes, m.little.l1d.assoc, m.mem.line_bytes}},
        l2{{m.big.l2.size_bytes, m.big.l2.assoc, m.mem.line_bytes},
           {m.little.l2.size_bytes, m.little.l2.assoc, m.mem.line_bytes}} {}

  static size_t ix(ClusterId c) { return static_cast<size_t>(c); }
  static ClusterId other(ClusterId c) {
    return c == ClusterId::Big ? ClusterId::Little : ClusterId::Big;
  }

  uint64_t line_of(uint64_t addr) const { return addr / static_cast<uint64_t>(cfg.mem.line_bytes); }

  TimeFs next_arrival() const {
    TimeFs t = kNever;
    for (const auto& fl : inflight)
      for (const auto& f : fl) t = std::min(t, f.arrival);
    return t;
  }

  void apply_arrivals(TimeFs now) {
    struct Due {
      size_t cluster;
      OracleInflight f;
    };
    std::vector<Due> due;
    for (size_t c = 0; c < 2; ++c) {
      auto& fl = inflight[c];
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
      if (a.f.arrival != b.f.arrival) return a.f.arrival < b.f.arrival;
      return a.f.seq < b.f.seq;
    });
    for (const Due& d : due) {
      l1[d.cluster].insert(d.f.line, ++stamp);
      l2[d.cluster].insert(d.f.line, ++stamp);
    }
  }

  const OracleInflight* find_inflight(ClusterId c, uint64_t line) const {
    for (const auto& f : inflight[ix(c)])
      if (f.line == line) return &f;
    return nullptr;
  }

  ServiceResult access(ClusterId c, uint64_t addr, bool is_store, TimeFs now) {
    const uint64_t line = line_of(addr);
    const TimeFs l1_ready = now + fs_from_ns(cfg.cluster(c).l1d.hit_ns);
    if (is_store) {
      Source src;
      if (l1[ix(c)].touch(line, ++stamp)) src = Source::L1;
      else if (l2[ix(c)].touch(line, ++stamp)) src = Source::LocalL2;
      else if (const OracleInflight* f = find_inflight(c, line)) src = f->source;
      else if (l2[ix(other(c))].contains(line)) src = Source::RemoteCluster;
      else src = Source::Memory;
      l1[ix(c)].insert(line, ++stamp);
      l2[ix(c)].insert(line, ++stamp);
      return {src, l1_ready};
    }
    if (l1[ix(c)].touch(line, ++stamp)) return {Source::L1, l1_ready};
    if (l2[ix(c)].touch(line, ++stamp)) {
      l1[ix(c)].insert(line, ++stamp);
      return {Source::LocalL2, now + fs_from_ns(cfg.cluster(c).l2.hit_ns)};
    }
    if (const OracleInflight* f = find_inflight(c, line)) return {f->source, f->arrival};
    if (l2[ix(other(c))].contains(line)) {
      TimeFs ready = now + fs_from_ns(cfg.mem.coherence_ns);
      inflight[ix(c)].push_back({line, ready, Source::RemoteCluster, false, seq++});
      return {Source::RemoteCluster, ready};
    }
    TimeFs ready = now + fs_from_ns(cfg.mem.memory_ns);
    inflight[ix(c)].push_back({line, ready, Source::Memory, false, seq++});
    return {Source::Memory, ready};
  }

  PrefetchOutcome issue_prefetch(ClusterId c, uint64_t addr, TimeFs now) {
    const uint64_t line = line_of(addr);
    if (l1[ix(c)].contains(line) || l2[ix(c)].contains(line) ||
        find_inflight(c, line) != nullptr)
      return PrefetchOutcome::Deduped;
    int32_t pending = 0;
    for (const auto& f : inflight[ix(c)]) pending += f.is_prefetch ? 1 : 0;
    if (pending >= cfg.cluster(c).prefetch_queue_depth) return PrefetchOutcome::Dropped;
    const bool remote_hit = l2[ix(other(c))].contains(line);
    TimeFs ready = now + fs_from_ns(remote_hit ? cfg.mem.coherence_ns : cfg.mem.memory_ns);
    inflight[ix(c)].push_back(
        {line, ready, remote_hit ? Source::RemoteCluster : Source::Memory, true, seq++});
    return PrefetchOutcome::Enqueued;
  }
};

// --- per-cycle core execution ----------------------------------------------

struct InOrderCycleCore {
  const SliceOps* ops = nullptr;
  int64_t ip = 0;
  TimeFs busy_until = 0;
  TimeFs period = 0;
  int64_t cycles = 0;
  int64_t retired = 0;
  int64_t prefetch_issued = 0;

  void begin(const SliceOps* o, TimeFs start) {
    ops = o;
    ip = 0;
    busy_until = start;
    cycles = 0;
    retired = 0;
    prefetch_issued = 0;
  }
  bool done() const { return ip >= static_cast<int64_t>(ops->ops.size()); }

  // One cycle at grid time t; issues at most one instruction.
  void step(TimeFs t, ClusterId cl, OracleMemory* mem) {
    if (t < busy_until || done()) return;
    const SliceOp& op = ops->ops[static_cast<size_t>(ip)];
    const Instr& ins = *op.ins;
    switch (ins.kind) {
      case InstrKind::AddrCalc:
      case InstrKind::Compute:
        busy_until = t + static_cast<TimeFs>(ins.cost_ops) * period;
        cycles += ins.cost_ops;
        retired += ins.cost_ops;
        break;
      case InstrKind::Prefetch:
        mem->issue_prefetch(cl, op.addr, t);
        busy_until = t + period;
        cycles += 1;
        retired += 1;
        prefetch_issued += 1;
        break;
      case InstrKind::Load:
      case InstrKind::Store: {
        ServiceResult r = mem->access(cl, op.addr, ins.kind == InstrKind::Store, t);
        TimeFs resume = cycle_at_or_after(r.ready, period) * period;
        cycles += (resume - t) / period;
        retired += 1;
        busy_until = resume;
        break;
      }
    }
    ip++;
  }
};

struct OooCycleCore {
  struct Entry {
    int32_t op;
    bool issued = false;
    TimeFs completion = 0;
  };

  const SliceOps* ops = nullptr;
  const MachineConfig* cfg = nullptr;
  ClusterId cl = ClusterId::Big;
  TimeFs period = 0;
  int32_t width = 0, mlp = 0, window = 0;

  std::vector<Entry> rob;  // front = oldest
  size_t rob_head = 0;
  std::vector<int32_t> uops_done;
  std::vector<TimeFs> results;
  std::vector<TimeFs> loads_pending;
  int64_t dispatch_op = 0;
  int32_t dispatch_uop = 0;
  int64_t cycles = 0;
  int64_t retired = 0;
  int64_t prefetch_issued = 0;
  TimeFs end = 0;
  bool finished = true;

  void begin(const SliceOps* o, TimeFs start) {
    ops = o;
    rob.clear();
    rob_head = 0;
    uops_done.assign(o->ops.size(), 0);
    results.assign(o->ops.size(), kNever);
    loads_pending.clear();
    dispatch_op = 0;
    dispatch_uop = 0;
    cycles = 0;
    retired = 0;
    prefetch_issued = 0;
    finished = o->ops.empty();
    end = start;
  }

  bool done() const { return finished; }
  size_t rob_size() const { return rob.size() - rob_head; }

  bool ready(int32_t opi, TimeFs t) const {
    const SliceOp& o = ops->ops[static_cast<size_t>(opi)];
    for (int32_t d = 0; d < o.dep_count; ++d) {
      int32_t dep = ops->deps[static_cast<size_t>(o.first_dep + d)];
      const Instr& di = *ops->ops[static_cast<size_t>(dep)].ins;
      int32_t need = di.is_memory() ? 1 : di.cost_ops;
      if (uops_done[static_cast<size_t>(dep)] < need) return false;
      if (results[static_cast<size_t>(dep)] > t) return false;
    }
    return true;
  }

  void step(TimeFs t, OracleMemory* mem) {
    if (finished) return;
    cycles += 1;

    int32_t n = 0;
    while (rob_head < rob.size() && n < width) {
      Entry& head = rob[rob_head];
      if (!head.issued || head.completion > t) break;
      rob_head++;
      n++;
    }
    if (rob_head > 4096) {  // keep the deque-as-vector compact
      rob.erase(rob.begin(), rob.begin() + static_cast<long>(rob_head));
      rob_head = 0;
    }

    n = 0;
    while (n < width && static_cast<int32_t>(rob_size()) < window &&
           dispatch_op < static_cast<int64_t>(ops->ops.size())) {
      rob.push_back({static_cast<int32_t>(dispatch_op), false, 0});
      n++;
      const Instr& ins = *ops->ops[static_cast<size_t>(dispatch_op)].ins;
      int32_t uops = ins.is_memory() ? 1 : ins.cost_ops;
      if (++dispatch_uop >= uops) {
        dispatch_op++;
        dispatch_uop = 0;
      }
    }

    n = 0;
    for (size_t k = rob_head; k < rob.size() && n < width; ++k) {
      Entry& e = rob[k];
      if (e.issued) continue;
      const SliceOp& op = ops->ops[static_cast<size_t>(e.op)];
      const Instr& ins = *op.ins;
      if (!ready(e.op, t)) continue;
      if (ins.kind == InstrKind::Load) {
        int32_t outstanding = 0;
        for (TimeFs c : loads_pending) outstanding += c > t ? 1 : 0;
        if (outstanding >= mlp) continue;
        ServiceResult r = mem->access(cl, op.addr, false, t);
        e.completion = r.ready;
        loads_pending.push_back(r.ready);
        if (loads_pending.size() > 64) {
          loads_pending.erase(std::remove_if(loads_pending.begin(), loads_pending.end(),
                                             [&](TimeFs c) { return c <= t; }),
                              loads_pending.end());
        }
      } else if (ins.kind == InstrKind::Store) {
        ServiceResult r = mem->access(cl, op.addr, true, t);
        e.completion = r.ready;
      } else if (ins.kind == InstrKind::Prefetch) {
        mem->issue_prefetch(cl, op.addr, t);
        prefetch_issued++;
        e.completion = t + period;
      } else {
        e.completion = t + period;
      }
      e.issued = true;
      uops_done[static_cast<size_t>(e.op)]++;
      TimeFs& rt = results[static_cast<size_t>(e.op)];
      rt = rt == kNever ? e.completion : std::max(rt, e.completion);
      retired += 1;
      n++;
    }

    if (rob_head == rob.size() && dispatch_op >= static_cast<int64_t>(ops->ops.size())) {
      finished = true;
      end = t + period;
    }
  }
};

// --- per-phase protocol machine ---------------------------------------------

constexpr TimeFs kGateUnset = std::numeric_limits<TimeFs>::min();
constexpr TimeFs kGateOpen = kGateUnset + 1;

struct OraclePhase {
  bool is_access;
  const ValidatedKernel* kernel;
  const ChunkedKernel* geom;
  const MachineConfig* cfg;
  ClusterId cl;
  SyncPolicy policy;
  OracleResult* out;
  std::vector<TimeFs>* my_gate;
  std::vector<TimeFs>* other_gate;
  TimeFs period;
  TimeFs lock_fs;
  SplitMix64 rng;
  int64_t slice_count;
  int64_t period_slices;

  enum class St { StartWait, LockWait, LockBusy, Sleep, Inner, Done } st = St::Done;
  int64_t invocation = 0;
  int64_t slice = 0;
  TimeFs ready = 0;
  TimeFs busy_until = 0;
  TimeFs inner_start = 0;
  bool sleep_is_pre = false;
  int64_t overlap_trigger = -1;
  bool released_early = false;
  TimeFs last_end = 0;

  SliceOps ops;
  InOrderCycleCore in_order;
  OooCycleCore ooo;
  bool use_in_order;

  OraclePhase(bool access, const ValidatedKernel* k, const ChunkedKernel* g,
              const MachineConfig* m, ClusterId c, const SyncPolicy& p, OracleResult* o,
              std::vector<TimeFs>* mine, std::vector<TimeFs>* other)
      : is_access(access),
        kernel(k),
        geom(g),
        cfg(m),
        cl(c),
        policy(p),
        out(o),
        my_gate(mine),
        other_gate(other),
        period(m->cluster(c).core.period_fs()),
        lock_fs(fs_from_ns(m->costs.lock_ns)),
        rng(p.rng_seed ^ (access ? 0xACCE55AAULL : 0xE8EC07E0ULL)),
        slice_count(g->slice_count) {
    period_slices = barriers() ? p.resync_period_slices : slice_count;
    use_in_order = m->cluster(c).core.kind == CoreKind::InOrder;
    in_order.period = period;
    ooo.cfg = m;
    ooo.cl = c;
    ooo.period = period;
    ooo.width = m->cluster(c).core.issue_width;
    ooo.mlp = m->cluster(c).core.mlp_degree;
    ooo.window = m->cluster(c).core.window;
  }

  bool barriers() const {
    return policy.variant == SyncVariant::LockStep || policy.variant == SyncVariant::Hybrid;
  }
  bool sleeps() const {
    return policy.variant == SyncVariant::Timed || policy.variant == SyncVariant::Hybrid;
  }
  int64_t window(int64_t s) const { return s / period_slices; }
  bool window_start(int64_t s) const { return s % period_slices == 0; }
  bool window_end(int64_t s) const { return (s + 1) % period_slices == 0 || s == slice_count - 1; }

  void start_invocation(int64_t v, TimeFs rdy) {
    invocation = v;
    slice = 0;
    ready = rdy;
    st = St::StartWait;
  }

  TimeFs sleep_fs(int64_t base_ns) {
    double dur_ns = static_cast<double>(base_ns);
    if (policy.jitter_stddev_ns > 0) dur_ns += rng.next_gaussian() * policy.jitter_stddev_ns;
    if (dur_ns <= 0) return 0;
    return static_cast<TimeFs>(std::llround(dur_ns * static_cast<double>(kFsPerNs)));
  }

  void prelude(TimeFs t) {
    if (barriers() && window_start(slice)) {
      st = St::LockWait;
      return;
    }
    if (!is_access && sleeps()) {
      busy_until = t + sleep_fs(policy.sleep_execute_ns);
      sleep_is_pre = true;
      st = St::Sleep;
      return;
    }
    enter_inner(t);
  }

  void enter_inner(TimeFs t) {
    expand_slice(*kernel, geom->slice_begin(slice), geom->slice_end(slice), &ops);
    inner_start = t;
    released_early = false;
    overlap_trigger = -1;
    if (is_access && barriers() && policy.lead_fraction < 1.0 && window_end(slice)) {
      overlap_trigger = static_cast<int64_t>(
          std::ceil(policy.lead_fraction * static_cast<double>(ops.prefetch_count)));
      if (overlap_trigger <= 0) {
        release(t);
        released_early = true;
        overlap_trigger = -1;
      }
    }
    if (use_in_order)
      in_order.begin(&ops, t);
    else
      ooo.begin(&ops, t);
    st = St::Inner;
    if (ops.ops.empty()) finish_slice(t);
  }

  void release(TimeFs at) {
    int64_t w = window(slice) + (is_access ? 0 : 1);
    (*other_gate)[static_cast<size_t>(w)] = at;
  }

  void finish_slice(TimeFs t) {
    int64_t cyc = use_in_order ? in_order.cycles : ooo.cycles;
    int64_t ret = use_in_order ? in_order.retired : ooo.retired;
    Interval iv;
    iv.core = cl;
    iv.tag = is_access ? IntervalTag::AccessInner : IntervalTag::ExecuteInner;
    iv.begin = inner_start;
    iv.end = t;
    iv.slice = invocation * slice_count + slice;
    iv.stats.cycles = cyc;
    iv.stats.retired = ret;
    out->timeline.intervals.push_back(iv);
    out->per_slice.push_back({is_access, invocation * slice_count + slice, cyc, ret});

    TimeFs cur = t + static_cast<TimeFs>(cfg->costs.loop_overhead_ops) * period;
    if (barriers() && window_end(slice) && !released_early) release(cur);
    last_end = cur;

    const bool last = slice == slice_count - 1;
    if (is_access && sleeps() && !last && !(barriers() && window_end(slice))) {
      slice++;
      busy_until = cur + sleep_fs(policy.sleep_access_ns);
      sleep_is_pre = false;
      st = St::Sleep;
      return;
    }
    slice++;
    if (slice == slice_count) {
      st = St::Done;
      return;
    }
    // The outer bookkeeping keeps the core busy until `cur`; fold it into the
    // generic busy gate and re-run the prelude at the next eligible cycle.
    busy_until = cur;
    sleep_is_pre = false;
    st = St::Sleep;  // reuse the wait-until-busy_until mechanism, no sleep drawn
  }

  // One core cycle at grid time t. Zero-width protocol transitions chain
  // within the cycle; at most one unit of core work happens per cycle.
  void step(TimeFs t, OracleMemory* mem) {
    for (;;) {
      switch (st) {
        case St::StartWait:
          if (t < ready) return;
          prelude(t);
          continue;
        case St::LockWait: {
          TimeFs g = (*my_gate)[static_cast<size_t>(window(slice))];
          if (g == kGateUnset) return;
          if (g != kGateOpen && g >= t) return;  // release visible strictly after
          busy_until = t + lock_fs;
          st = St::LockBusy;
          continue;
        }
        case St::LockBusy:
          if (t < busy_until) return;
          enter_inner(t);
          continue;
        case St::Sleep:
          if (t < busy_until) return;
          if (sleep_is_pre) {
            enter_inner(t);
          } else {
            prelude(t);
          }
          continue;
        case St::Inner: {
          if (use_in_order) {
            if (in_order.done()) {
              // The slice ends at the first cycle at or after the last op's
              // completion.
              if (t < in_order.busy_until) return;
              finish_slice(t);
              continue;
            }
            in_order.step(t, cl, mem);
            if (overlap_trigger >= 0 && !released_early &&
                in_order.prefetch_issued >= overlap_trigger) {
              release(in_order.busy_until);
              released_early = true;
            }
          } else {
            ooo.step(t, mem);
            if (ooo.done()) {
              finish_slice(ooo.end);
              continue;
            }
          }
          return;
        }
        case St::Done:
          return;
      }
    }
  }
};

}  // namespace

OracleResult run_oracle(const ValidatedKernel& kernel, const MachineConfig& machine,
                        const SyncPolicy& sync, const ThreadModel& threads, int64_t granularity) {
  if (kernel.iterations() > kOracleMaxIterations)
    fail(ErrCode::OracleTooLarge,
         "oracle is single-cycle brute force; N must be <= " +
             std::to_string(kOracleMaxIterations));
  machine.validate();
  sync.validate();

  OracleResult out;
  OracleMemory mem(machine);
  ChunkedKernel chunked = chunk(kernel, granularity);

  const int64_t windows =
      (chunked.slice_count + sync.resync_period_slices - 1) / sync.resync_period_slices;
  std::vector<TimeFs> access_gate, execute_gate;

  if (sync.variant == SyncVariant::Coupled) {
    OraclePhase exec(false, &chunked.base, &chunked, &machine, ClusterId::Big, sync, &out,
                     &execute_gate, &access_gate);
    execute_gate.assign(static_cast<size_t>(windows) + 2, kGateUnset);
    access_gate = execute_gate;
    TimeFs t = 0;
    TimeFs period = exec.period;
    TimeFs cycle = 0;
    for (int64_t v = 0; v < kernel.invocations(); ++v) {
      exec.start_invocation(v, t);
      while (exec.st != OraclePhase::St::Done) {
        TimeFs now = cycle * period;
        mem.apply_arrivals(now);
        exec.step(now, &mem);
        cycle++;
      }
      t = exec.last_end;
    }
    out.end_time = exec.last_end;
    return out;
  }

  PhasePair pair = make_phase_pair(chunked);
  OraclePhase access(true, &pair.access, &pair.chunked, &machine, ClusterId::Little, sync, &out,
                     &access_gate, &execute_gate);
  OraclePhase execute(false, &pair.execute(), &pair.chunked, &machine, ClusterId::Big, sync, &out,
                      &execute_gate, &access_gate);

  const TimeFs thread_fs =
      fs_from_ns(threads.cost_override_ns >= 0
                     ? threads.cost_override_ns
                     : (threads.kind == ThreadModel::Kind::SpawnPerInvocation
                            ? machine.costs.spawn_join_ns
                            : machine.costs.signal_ns));

  TimeFs t0 = 0;
  int64_t cycA = 0, cycE = 0;
  for (int64_t v = 0; v < kernel.invocations(); ++v) {
    access_gate.assign(static_cast<size_t>(windows) + 2, kGateUnset);
    access_gate[0] = kGateOpen;
    execute_gate.assign(static_cast<size_t>(windows) + 2, kGateUnset);
    access.start_invocation(v, t0 + thread_fs);
    execute.start_invocation(v, t0 + thread_fs);
    while (access.st != OraclePhase::St::Done || execute.st != OraclePhase::St::Done) {
      TimeFs ta = cycA * access.period;
      TimeFs te = cycE * execute.period;
      TimeFs now = std::min(ta, te);
      mem.apply_arrivals(now);
      if (ta == now && access.st != OraclePhase::St::Done) access.step(now, &mem);
      if (ta == now) cycA++;
      if (te == now) {
        if (execute.st != OraclePhase::St::Done) execute.step(now, &mem);
        cycE++;
      }
    }
    t0 = std::max(access.last_end, execute.last_end);
  }
  out.end_time = t0;
  return out;
}

std::string oracle_diff(const ValidatedKernel& kernel, const MachineConfig& machine,
                        const SyncPolicy& sync, const ThreadModel& threads, int64_t granularity) {
  OracleResult oracle = run_oracle(kernel, machine, sync, threads, granularity);

  RunResult engine;
  if (sync.variant == SyncVariant::Coupled) {
    engine = run_coupled(chunk(kernel, granularity), machine);
  } else {
    engine = run_dae(make_phase_pair(chunk(kernel, granularity)), machine, sync, threads);
  }

  auto key = [](const SliceCycles& s) { return s.slice * 2 + (s.access ? 1 : 0); };
  std::vector<SliceCycles> a = oracle.per_slice, b = engine.per_slice;
  auto by_key = [&](const SliceCycles& x, const SliceCycles& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), by_key);
  std::sort(b.begin(), b.end(), by_key);
  if (a.size() != b.size())
    return "slice count mismatch: oracle " + std::to_string(a.size()) + " vs engine " +
           std::to_string(b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    if (key(a[k]) != key(b[k]) || a[k].cycles != b[k].cycles || a[k].retired != b[k].retired) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "slice %lld (%s): oracle cycles=%lld retired=%lld, engine cycles=%lld "
                    "retired=%lld",
                    static_cast<long long>(a[k].slice), a[k].access ? "access" : "execute",
                    static_cast<long long>(a[k].cycles), static_cast<long long>(a[k].retired),
                    static_cast<long long>(b[k].cycles), static_cast<long long>(b[k].retired));
      return buf;
    }
  }
  if (oracle.end_time != engine.timeline.end_time) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "end time mismatch: oracle %.3f ns vs engine %.3f ns",
                  ns_from_fs(oracle.end_time), ns_from_fs(engine.timeline.end_time));
    return buf;
  }
  return "";
}

}  // namespace dae
