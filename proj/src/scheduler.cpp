#include "dae/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <memory>

namespace dae {

namespace {

constexpr TimeFs kNever = MemorySystem::kNever;

// Release times enabling each barrier window. A window is `resync_period`
// slices (1 under LockStep, so every slice is a window).
struct LockGate {
  static constexpr TimeFs kUnset = std::numeric_limits<TimeFs>::min();
  static constexpr TimeFs kAlwaysOpen = kUnset + 1;
  std::vector<TimeFs> grants;

  void reset(int64_t windows, bool first_open) {
    grants.assign(static_cast<size_t>(windows) + 2, kUnset);
    if (first_open) grants[0] = kAlwaysOpen;
  }
};

TimeFs sleep_duration_fs(int64_t base_ns, double stddev_ns, SplitMix64* rng) {
  double dur_ns = static_cast<double>(base_ns);
  if (stddev_ns > 0) dur_ns += rng->next_gaussian() * stddev_ns;
  if (dur_ns <= 0) return 0;
  return static_cast<TimeFs>(std::llround(dur_ns * static_cast<double>(kFsPerNs)));
}

// One simulated phase pinned to one core, advanced as a discrete-event
// process. Only interleaving-visible actions (memory probes, lock
// acquisitions, sleep wakes) are separate events; bookkeeping the other
// phase cannot observe is folded into the same advance().
class PhaseProcess {
 public:
  PhaseProcess(bool is_access, const ValidatedKernel* kernel, const ChunkedKernel* geometry,
               const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms,
               const SyncPolicy& policy, Timeline* tl, std::vector<SliceCycles>* per_slice,
               LockGate* my_gate, LockGate* other_gate)
      : is_access_(is_access),
        kernel_(kernel),
        geom_(geometry),
        cfg_(cfg),
        cluster_(cluster),
        policy_(policy),
        tl_(tl),
        per_slice_(per_slice),
        my_gate_(my_gate),
        other_gate_(other_gate),
        period_(cfg.cluster(cluster).core.period_fs()),
        lock_fs_(fs_from_ns(cfg.costs.lock_ns)),
        rng_(policy.rng_seed ^ (is_access ? 0xACCE55AAULL : 0xE8EC07E0ULL)) {
    if (cfg.cluster(cluster).core.kind == CoreKind::InOrder)
      runner_ = std::make_unique<InOrderRunner>(cfg, cluster, ms);
    else
      runner_ = std::make_unique<OutOfOrderRunner>(cfg, cluster, ms);
    slice_count_ = geometry->slice_count;
    period_slices_ = barriers_enabled() ? policy.resync_period_slices : slice_count_;
  }

  SliceStats totals;

  void start_invocation(int64_t invocation, TimeFs ready) {
    invocation_ = invocation;
    slice_ = 0;
    ready_ = ready;
    state_ = State::StartWait;
  }

  bool invocation_done() const { return state_ == State::InvDone; }
  TimeFs current_time() const { return cur_; }

  TimeFs next_time() const {
    switch (state_) {
      case State::StartWait:
        return cycle_at_or_after(ready_, period_) * period_;
      case State::LockWaitSt: {
        TimeFs g = my_gate_->grants[static_cast<size_t>(window(slice_))];
        if (g == LockGate::kUnset) return kNever;
        if (g == LockGate::kAlwaysOpen) return request_;
        return std::max(request_, cycle_after(g, period_) * period_);
      }
      case State::Inner:
        return runner_->next_time();
      case State::SleepSt:
        return cycle_at_or_after(sleep_begin_ + sleep_dur_, period_) * period_;
      case State::InvDone:
        return kNever;
    }
    return kNever;
  }

  void advance() {
    switch (state_) {
      case State::StartWait:
        cur_ = next_time();
        begin_slice_prelude();
        break;
      case State::LockWaitSt: {
        TimeFs acquired = next_time();
        if (acquired > request_)
          emit(IntervalTag::LockWait, request_, acquired);
        if (lock_fs_ > 0) emit(IntervalTag::LockOp, acquired, acquired + lock_fs_);
        cur_ = cycle_at_or_after(acquired + lock_fs_, period_) * period_;
        enter_inner();
        break;
      }
      case State::SleepSt: {
        TimeFs wake = next_time();
        if (sleep_dur_ > 0) emit(IntervalTag::Sleep, sleep_begin_, sleep_begin_ + sleep_dur_);
        cur_ = wake;
        if (sleep_is_pre_)
          enter_inner();
        else
          begin_slice_prelude();
        break;
      }
      case State::Inner: {
        runner_->advance();
        if (overlap_trigger_ >= 0 && !released_early_ &&
            runner_->prefetches_issued() >= overlap_trigger_) {
          release_other(runner_->next_time());
          released_early_ = true;
        }
        if (runner_->done()) finish_slice();
        break;
      }
      case State::InvDone:
        assert(false && "advance() on a finished phase");
        break;
    }
  }

 private:
  enum class State { StartWait, LockWaitSt, SleepSt, Inner, InvDone };

  bool barriers_enabled() const {
    return policy_.variant == SyncVariant::LockStep || policy_.variant == SyncVariant::Hybrid;
  }
  bool sleeps_enabled() const {
    return policy_.variant == SyncVariant::Timed || policy_.variant == SyncVariant::Hybrid;
  }
  int64_t window(int64_t s) const { return s / period_slices_; }
  bool window_start(int64_t s) const { return s % period_slices_ == 0; }
  bool window_end(int64_t s) const {
    return (s + 1) % period_slices_ == 0 || s == slice_count_ - 1;
  }

  void emit(IntervalTag tag, TimeFs begin, TimeFs end, const SliceStats* stats = nullptr) {
    Interval iv;
    iv.core = cluster_;
    iv.tag = tag;
    iv.begin = begin;
    iv.end = end;
    iv.slice = invocation_ * slice_count_ + slice_;
    if (stats != nullptr) iv.stats = *stats;
    tl_->intervals.push_back(iv);
  }

  // Decide how slice `slice_` starts from time cur_.
  void begin_slice_prelude() {
    if (barriers_enabled() && window_start(slice_)) {
      request_ = cur_;
      state_ = State::LockWaitSt;
      return;
    }
    if (!is_access_ && sleeps_enabled()) {
      // Execute approximates the other phase's slice time before running.
      start_sleep(policy_.sleep_execute_ns, /*pre=*/true);
      return;
    }
    enter_inner();
  }

  void start_sleep(int64_t base_ns, bool pre) {
    sleep_begin_ = cur_;
    sleep_dur_ = sleep_duration_fs(base_ns, policy_.jitter_stddev_ns, &rng_);
    sleep_is_pre_ = pre;
    state_ = State::SleepSt;
  }

  void enter_inner() {
    expand_slice(*kernel_, geom_->slice_begin(slice_), geom_->slice_end(slice_), &ops_);
    inner_start_ = cur_;
    released_early_ = false;
    overlap_trigger_ = -1;
    if (is_access_ && barriers_enabled() && policy_.lead_fraction < 1.0 && window_end(slice_)) {
      overlap_trigger_ =
          static_cast<int64_t>(std::ceil(policy_.lead_fraction * static_cast<double>(ops_.prefetch_count)));
      if (overlap_trigger_ <= 0) {
        release_other(cur_);
        released_early_ = true;
        overlap_trigger_ = -1;
      }
    }
    runner_->begin_slice(&ops_, cur_);
    state_ = State::Inner;
    if (runner_->done()) finish_slice();  // degenerate empty slice
  }

  // Grant the other phase's gate. Access enables Execute's current window;
  // Execute enables Access's next window.
  void release_other(TimeFs at) {
    int64_t w = window(slice_) + (is_access_ ? 0 : 1);
    other_gate_->grants[static_cast<size_t>(w)] = at;
  }

  void finish_slice() {
    const SliceStats& st = runner_->stats();
    TimeFs end = runner_->end_time();
    emit(is_access_ ? IntervalTag::AccessInner : IntervalTag::ExecuteInner, inner_start_, end,
         &st);
    per_slice_->push_back(
        {is_access_, invocation_ * slice_count_ + slice_, st.cycles, st.retired});
    totals += st;
    cur_ = end;

    const int32_t outer_ops = cfg_.costs.loop_overhead_ops;
    if (outer_ops > 0) {
      SliceStats outer;
      outer.cycles = outer_ops;
      outer.retired = outer_ops;
      emit(is_access_ ? IntervalTag::AccessOuter : IntervalTag::ExecuteOuter, cur_,
           cur_ + outer_ops * period_, &outer);
      cur_ += outer_ops * period_;
    }

    if (barriers_enabled() && window_end(slice_) && !released_early_) release_other(cur_);

    const bool last = slice_ == slice_count_ - 1;
    if (is_access_ && sleeps_enabled() && !last &&
        !(barriers_enabled() && window_end(slice_))) {
      // Access pauses between slices to approximate Execute's slice time;
      // under Hybrid the window-end release takes the sleep's place.
      slice_++;
      start_sleep(policy_.sleep_access_ns, /*pre=*/false);
      return;
    }
    slice_++;
    if (slice_ == slice_count_) {
      state_ = State::InvDone;
      return;
    }
    begin_slice_prelude();
  }

  const bool is_access_;
  const ValidatedKernel* kernel_;
  const ChunkedKernel* geom_;
  const MachineConfig& cfg_;
  ClusterId cluster_;
  SyncPolicy policy_;
  Timeline* tl_;
  std::vector<SliceCycles>* per_slice_;
  LockGate* my_gate_;
  LockGate* other_gate_;
  TimeFs period_;
  TimeFs lock_fs_;
  SplitMix64 rng_;
  std::unique_ptr<CoreRunner> runner_;
  SliceOps ops_;

  int64_t slice_count_ = 0;
  int64_t period_slices_ = 1;
  State state_ = State::InvDone;
  int64_t invocation_ = 0;
  int64_t slice_ = 0;
  TimeFs ready_ = 0;
  TimeFs cur_ = 0;
  TimeFs request_ = 0;
  TimeFs inner_start_ = 0;
  TimeFs sleep_begin_ = 0;
  TimeFs sleep_dur_ = 0;
  bool sleep_is_pre_ = false;
  int64_t overlap_trigger_ = -1;
  bool released_early_ = false;
};

// Advances processes and pending cache fills in global time order:
// arrivals first at any instant, then Access, then Execute.
void event_loop(MemorySystem* ms, PhaseProcess* access, PhaseProcess* execute) {
  for (;;) {
    bool a_done = access == nullptr || access->invocation_done();
    bool e_done = execute->invocation_done();
    if (a_done && e_done) return;
    TimeFs ta = a_done ? kNever : access->next_time();
    TimeFs te = e_done ? kNever : execute->next_time();
    TimeFs tc = std::min(ta, te);
    assert(tc != kNever && "phases deadlocked");
    TimeFs tr = ms->next_arrival();
    if (tr <= tc) {
      ms->apply_arrivals(tc);
    }
    if (ta <= te && access != nullptr)
      access->advance();
    else
      execute->advance();
  }
}

RunResult finish_run(Timeline&& tl, std::vector<SliceCycles>&& per_slice,
                     const SliceStats& access_total, const SliceStats& execute_total,
                     int64_t slices_per_inv, int64_t invocations) {
  RunResult r;
  r.timeline = std::move(tl);
  r.per_slice = std::move(per_slice);
  r.access_total = access_total;
  r.execute_total = execute_total;
  r.slices_per_invocation = slices_per_inv;
  r.total_slices = slices_per_inv * invocations;
  for (const Interval& iv : r.timeline.intervals)
    r.timeline.end_time = std::max(r.timeline.end_time, iv.end);
  return r;
}

}  // namespace

const char* sync_variant_name(SyncVariant v) {
  switch (v) {
    case SyncVariant::Coupled: return "coupled";
    case SyncVariant::LockStep: return "lockstep";
    case SyncVariant::Timed: return "timed";
    case SyncVariant::Hybrid: return "hybrid";
  }
  return "?";
}

SyncVariant sync_variant_from_name(const std::string& name) {
  if (name == "coupled") return SyncVariant::Coupled;
  if (name == "lockstep") return SyncVariant::LockStep;
  if (name == "timed") return SyncVariant::Timed;
  if (name == "hybrid") return SyncVariant::Hybrid;
  fail(ErrCode::ConfigError, "unknown sync policy '" + name + "'");
}

void SyncPolicy::validate() const {
  if (resync_period_slices < 1)
    fail(ErrCode::ConfigError, "resync_period_slices must be >= 1");
  if (jitter_stddev_ns < 0) fail(ErrCode::ConfigError, "jitter stddev must be >= 0");
  if (sleep_access_ns < 0 || sleep_execute_ns < 0)
    fail(ErrCode::ConfigError, "sleep durations must be >= 0");
  if (lead_fraction < 0 || lead_fraction > 1)
    fail(ErrCode::ConfigError, "lead_fraction must be in [0, 1]");
}

SyncPolicy set_overlap(const SyncPolicy& policy, double lead_fraction) {
  if (policy.variant != SyncVariant::LockStep && policy.variant != SyncVariant::Hybrid)
    fail(ErrCode::ConfigError, "overlap requires the LockStep or Hybrid policy");
  SyncPolicy p = policy;
  p.lead_fraction = lead_fraction;
  p.validate();
  return p;
}

RunResult run_coupled(const ChunkedKernel& kernel, const MachineConfig& machine) {
  machine.validate();
  MemorySystem ms(machine);
  Timeline tl;
  std::vector<SliceCycles> per_slice;
  LockGate unused_a, unused_b;
  SyncPolicy coupled = SyncPolicy::coupled();

  PhaseProcess exec(/*is_access=*/false, &kernel.base, &kernel, machine, ClusterId::Big, &ms,
                    coupled, &tl, &per_slice, &unused_a, &unused_b);
  TimeFs t = 0;
  for (int64_t v = 0; v < kernel.base.invocations(); ++v) {
    exec.start_invocation(v, t);
    event_loop(&ms, nullptr, &exec);
    t = exec.current_time();
  }
  return finish_run(std::move(tl), std::move(per_slice), {}, exec.totals, kernel.slice_count,
                    kernel.base.invocations());
}

RunResult run_dae(const PhasePair& pair, const MachineConfig& machine, const SyncPolicy& sync,
                  const ThreadModel& threads) {
  if (sync.variant == SyncVariant::Coupled)
    fail(ErrCode::ConfigError, "run_dae requires a decoupled sync policy; use run_coupled");
  sync.validate();
  machine.validate();

  MemorySystem ms(machine);
  Timeline tl;
  std::vector<SliceCycles> per_slice;
  LockGate access_gate, execute_gate;

  PhaseProcess access(/*is_access=*/true, &pair.access, &pair.chunked, machine, ClusterId::Little,
                      &ms, sync, &tl, &per_slice, &access_gate, &execute_gate);
  PhaseProcess execute(/*is_access=*/false, &pair.execute(), &pair.chunked, machine,
                       ClusterId::Big, &ms, sync, &tl, &per_slice, &execute_gate, &access_gate);

  const int64_t invocations = pair.execute().invocations();
  const int64_t windows =
      (pair.chunked.slice_count + sync.resync_period_slices - 1) / sync.resync_period_slices;
  const TimeFs thread_fs =
      fs_from_ns(threads.cost_override_ns >= 0
                     ? threads.cost_override_ns
                     : (threads.kind == ThreadModel::Kind::SpawnPerInvocation
                            ? machine.costs.spawn_join_ns
                            : machine.costs.signal_ns));
  const IntervalTag thread_tag = threads.kind == ThreadModel::Kind::SpawnPerInvocation
                                     ? IntervalTag::Spawn
                                     : IntervalTag::Signal;

  TimeFs t = 0;
  for (int64_t v = 0; v < invocations; ++v) {
    // access_lock starts unlocked, execute_lock locked.
    access_gate.reset(windows, /*first_open=*/true);
    execute_gate.reset(windows, /*first_open=*/false);
    if (thread_fs > 0) {
      Interval iv;
      iv.core = ClusterId::Big;
      iv.tag = thread_tag;
      iv.begin = t;
      iv.end = t + thread_fs;
      iv.slice = v * pair.chunked.slice_count;
      tl.intervals.push_back(iv);
    }
    access.start_invocation(v, t + thread_fs);
    execute.start_invocation(v, t + thread_fs);
    event_loop(&ms, &access, &execute);
    t = std::max(access.current_time(), execute.current_time());
  }
  return finish_run(std::move(tl), std::move(per_slice), access.totals, execute.totals,
                    pair.chunked.slice_count, invocations);
}

SweepResult sweep_granularity(const ValidatedKernel& kernel, const MachineConfig& machine,
                              const std::vector<int64_t>& granularities, const SyncPolicy& sync,
                              const ThreadModel& threads) {
  if (granularities.empty())
    fail(ErrCode::ConfigError, "granularity list must not be empty");
  for (int64_t g : granularities)
    if (g < 1 || g > kernel.iterations())
      fail(ErrCode::GranularityOutOfRange,
           "granularity " + std::to_string(g) + " outside [1, " +
               std::to_string(kernel.iterations()) + "]");

  SweepResult out;
  // The baseline's inner-loop behaviour is granularity-independent (outer
  // bookkeeping sits outside the measured regions), so one coupled run at
  // g = N serves the whole sweep.
  out.baseline = run_coupled(chunk(kernel, kernel.iterations()), machine);
  for (int64_t g : granularities) {
    PhasePair pair = make_phase_pair(chunk(kernel, g));
    out.entries.push_back({g, run_dae(pair, machine, sync, threads)});
  }
  return out;
}

}  // namespace dae
