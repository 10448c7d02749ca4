#include "dae/metrics.hpp"

#include <algorithm>

namespace dae {

namespace {

bool region_matches(const Region& r, const Interval& iv) {
  switch (r.kind) {
    case RegionKind::InnerLoop:
      return iv.slice == r.slice &&
             iv.tag == (r.access ? IntervalTag::AccessInner : IntervalTag::ExecuteInner);
    case RegionKind::Phase:
      if (r.access)
        return iv.tag == IntervalTag::AccessInner || iv.tag == IntervalTag::AccessOuter;
      return iv.tag == IntervalTag::ExecuteInner || iv.tag == IntervalTag::ExecuteOuter;
    case RegionKind::Whole:
      return iv.tag == IntervalTag::AccessInner || iv.tag == IntervalTag::AccessOuter ||
             iv.tag == IntervalTag::ExecuteInner || iv.tag == IntervalTag::ExecuteOuter;
  }
  return false;
}

// Inner-loop cycles of one phase, optionally put through the divided counter
// per slice the way the paper's per-sample reads would be.
RegionCounters inner_counters(const RunResult& run, bool access, const CounterConfig& counters,
                              bool quantized) {
  RegionCounters out;
  for (const SliceCycles& sc : run.per_slice) {
    if (sc.access != access) continue;
    int64_t cycles = sc.cycles;
    if (quantized) cycles = unquantize_counter(quantize_counter(cycles, counters), counters);
    out.cycles += cycles;
    out.retired_instructions += sc.retired;
  }
  return out;
}

}  // namespace

RegionCounters measure_region(const Timeline& timeline, const Region& region) {
  RegionCounters out;
  bool found = false;
  for (const Interval& iv : timeline.intervals) {
    if (!region_matches(region, iv)) continue;
    found = true;
    out.cycles += iv.stats.cycles;
    out.retired_instructions += iv.stats.retired;
  }
  if (!found) fail(ErrCode::UnknownRegion, "no timeline intervals match the requested region");
  return out;
}

uint64_t quantize_counter(int64_t cycles, const CounterConfig& cfg) {
  if (cycles < 0) fail(ErrCode::ConfigError, "cycle count must be >= 0");
  uint64_t q = static_cast<uint64_t>(cycles) / static_cast<uint64_t>(cfg.cycle_divider);
  if (cfg.counter_width_bits >= 64) return q;
  return q & ((1ULL << cfg.counter_width_bits) - 1);
}

int64_t unquantize_counter(uint64_t value, const CounterConfig& cfg) {
  return static_cast<int64_t>(value) * cfg.cycle_divider;
}

double ipc(const RegionCounters& c) {
  if (c.cycles == 0) fail(ErrCode::DivisionByZero, "IPC of a zero-cycle region");
  return static_cast<double>(c.retired_instructions) / static_cast<double>(c.cycles);
}

double ipc_speedup(const RegionCounters& dae, const RegionCounters& baseline) {
  return ipc(dae) / ipc(baseline);
}

EnergyResult energy_edp(const Timeline& timeline, const PowerConfig& power) {
  const double wall_s = ns_from_fs(timeline.end_time) * 1e-9;
  const double big_s = ns_from_fs(timeline.busy_fs(ClusterId::Big)) * 1e-9;
  const double little_s = ns_from_fs(timeline.busy_fs(ClusterId::Little)) * 1e-9;
  double energy = power.big_active_mw * big_s + power.big_idle_mw * (wall_s - big_s) +
                  power.little_active_mw * little_s + power.little_idle_mw * (wall_s - little_s);
  return {energy, energy * wall_s};
}

RunMetrics compute_metrics(const RunResult& dae, const RunResult& baseline,
                           const MachineConfig& machine, bool quantized) {
  RunMetrics m;

  RegionCounters exec = inner_counters(dae, /*access=*/false, machine.counters, quantized);
  RegionCounters base = inner_counters(baseline, /*access=*/false, machine.counters, quantized);
  m.execute_ipc = ipc(exec);
  m.baseline_ipc = ipc(base);
  m.ipc_speedup = m.execute_ipc / m.baseline_ipc;

  m.baseline_runtime_ns = ns_from_fs(baseline.timeline.end_time);
  m.total_runtime_ns = ns_from_fs(dae.timeline.end_time);
  m.slowdown = m.total_runtime_ns / m.baseline_runtime_ns;

  const Timeline& tl = dae.timeline;
  m.access_ns = ns_from_fs(tl.tag_fs(IntervalTag::AccessInner) + tl.tag_fs(IntervalTag::AccessOuter));
  m.execute_ns =
      ns_from_fs(tl.tag_fs(IntervalTag::ExecuteInner) + tl.tag_fs(IntervalTag::ExecuteOuter));
  m.sync_ns = ns_from_fs(tl.tag_fs(IntervalTag::LockOp));
  m.thread_ns = ns_from_fs(tl.tag_fs(IntervalTag::Spawn) + tl.tag_fs(IntervalTag::Signal));
  m.sleep_ns = ns_from_fs(tl.tag_fs(IntervalTag::Sleep));
  m.lock_wait_ns = ns_from_fs(tl.tag_fs(IntervalTag::LockWait));
  m.idle_ns = m.total_runtime_ns - m.access_ns - m.execute_ns - m.sync_ns - m.thread_ns;

  const double little_busy = ns_from_fs(tl.busy_fs(ClusterId::Little));
  const double big_busy = ns_from_fs(tl.busy_fs(ClusterId::Big));
  m.little_time_fraction =
      little_busy + big_busy > 0 ? little_busy / (little_busy + big_busy) : 0.0;

  m.execute_sources = dae.execute_total.counts;
  m.access_sources = dae.access_total.counts;
  m.prefetch = dae.access_total.prefetch;

  EnergyResult e = energy_edp(dae.timeline, machine.power);
  m.energy_mj = e.energy_mj;
  m.edp_mj_s = e.edp_mj_s;
  EnergyResult eb = energy_edp(baseline.timeline, machine.power);
  m.baseline_energy_mj = eb.energy_mj;
  m.baseline_edp_mj_s = eb.edp_mj_s;
  return m;
}

}  // namespace dae
