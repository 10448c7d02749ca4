#include "dae/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dae/kernel_text.hpp"
#include "dae/transform.hpp"

namespace dae {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int64_t> parse_int_list(const std::string& s) {
  std::vector<int64_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      std::string t = trim(cur);
      if (!t.empty()) out.push_back(std::stoll(t));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

const char* thread_model_name(const ThreadModel& t) {
  return t.kind == ThreadModel::Kind::SpawnPerInvocation ? "spawn" : "pool";
}

}  // namespace

std::string metrics_csv_header() {
  return "kernel,n,invocations,granularity,policy,threads,seed,"
         "baseline_ipc,execute_ipc,ipc_speedup,"
         "baseline_runtime_ns,total_runtime_ns,slowdown,"
         "access_ns,execute_ns,sync_ns,thread_ns,sleep_ns,lock_wait_ns,idle_ns,"
         "little_time_fraction,"
         "exec_l1,exec_l2,exec_remote,exec_mem,"
         "acc_l1,acc_l2,acc_remote,acc_mem,"
         "pf_enqueued,pf_deduped,pf_dropped,"
         "instruction_overhead,energy_mj,edp_mj_s,baseline_energy_mj,baseline_edp_mj_s";
}

std::string metrics_csv_row(const std::string& kernel, int64_t n, int64_t invocations,
                            int64_t granularity, const SyncPolicy& sync, const ThreadModel& threads,
                            uint64_t seed, const RunMetrics& m) {
  std::ostringstream o;
  o << kernel << ',' << n << ',' << invocations << ',' << granularity << ','
    << sync_variant_name(sync.variant) << ',' << thread_model_name(threads) << ',' << seed << ','
    << fmt("%.6f", m.baseline_ipc) << ',' << fmt("%.6f", m.execute_ipc) << ','
    << fmt("%.6f", m.ipc_speedup) << ',' << fmt("%.3f", m.baseline_runtime_ns) << ','
    << fmt("%.3f", m.total_runtime_ns) << ',' << fmt("%.6f", m.slowdown) << ','
    << fmt("%.3f", m.access_ns) << ',' << fmt("%.3f", m.execute_ns) << ','
    << fmt("%.3f", m.sync_ns) << ',' << fmt("%.3f", m.thread_ns) << ','
    << fmt("%.3f", m.sleep_ns) << ',' << fmt("%.3f", m.lock_wait_ns) << ','
    << fmt("%.3f", m.idle_ns) << ',' << fmt("%.6f", m.little_time_fraction) << ','
    << m.execute_sources.l1 << ',' << m.execute_sources.l2 << ',' << m.execute_sources.remote
    << ',' << m.execute_sources.memory << ',' << m.access_sources.l1 << ','
    << m.access_sources.l2 << ',' << m.access_sources.remote << ',' << m.access_sources.memory
    << ',' << m.prefetch.enqueued << ',' << m.prefetch.deduped << ',' << m.prefetch.dropped << ','
    << fmt("%.6f", m.instruction_overhead) << ',' << fmt("%.6f", m.energy_mj) << ','
    << fmt("%.9f", m.edp_mj_s) << ',' << fmt("%.6f", m.baseline_energy_mj) << ','
    << fmt("%.9f", m.baseline_edp_mj_s);
  return o.str();
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrCode::ConfigError, "cannot open scenario file '" + path + "'");
  ScenarioConfig cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrCode::ParseError, path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "kernel") cfg.kernel_ref = value;
    else if (key == "n") cfg.n_override = std::stoll(value);
    else if (key == "invocations") cfg.invocations_override = std::stoll(value);
    else if (key == "machine") cfg.machine_path = value;
    else if (key == "granularities") cfg.granularities = parse_int_list(value);
    else if (key == "policy") cfg.sync.variant = sync_variant_from_name(value);
    else if (key == "sleep_access_ns") cfg.sync.sleep_access_ns = std::stoll(value);
    else if (key == "sleep_execute_ns") cfg.sync.sleep_execute_ns = std::stoll(value);
    else if (key == "jitter_stddev_ns") cfg.sync.jitter_stddev_ns = std::stod(value);
    else if (key == "resync_period") cfg.sync.resync_period_slices = std::stoll(value);
    else if (key == "lead_fraction") cfg.sync.lead_fraction = std::stod(value);
    else if (key == "threads") {
      cfg.threads_set = true;
      if (value == "spawn") cfg.threads = ThreadModel::spawn();
      else if (value == "pool") cfg.threads = ThreadModel::pool();
      else fail(ErrCode::ParseError, path + ": unknown thread model '" + value + "'");
    } else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "name") cfg.name = value;
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "quantized_counters") cfg.quantized_counters = value == "true" || value == "1";
    else fail(ErrCode::ParseError, path + ": unknown scenario key '" + key + "'");
  }
  if (cfg.kernel_ref.empty()) fail(ErrCode::ConfigError, path + ": missing 'kernel ='");
  return cfg;
}

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg) {
  ResolvedScenario r;
  if (is_preset_name(cfg.kernel_ref)) {
    r.preset = make_preset(cfg.kernel_ref, cfg.n_override, cfg.invocations_override);
  } else {
    r.preset.kernel = load_kernel_file(cfg.kernel_ref);
    if (cfg.n_override > 0) r.preset.kernel.iteration_count = cfg.n_override;
    if (cfg.invocations_override > 0) r.preset.kernel.invocations = cfg.invocations_override;
    r.preset.default_threads = ThreadModel::spawn();
    r.preset.default_sweep = {r.preset.kernel.iteration_count};
  }
  r.machine = cfg.machine_path.empty() ? default_machine() : load_machine_file(cfg.machine_path);
  r.granularities = cfg.granularities.empty() ? r.preset.default_sweep : cfg.granularities;
  if (r.granularities.empty()) fail(ErrCode::ConfigError, "empty granularity list");
  r.threads = cfg.threads_set ? cfg.threads : r.preset.default_threads;
  return r;
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg) {
  ResolvedScenario rs = resolve_scenario(cfg);
  SyncPolicy sync = cfg.sync;
  sync.rng_seed = cfg.seed;
  sync.validate();
  if (sync.variant == SyncVariant::Coupled)
    fail(ErrCode::ConfigError, "scenario policy must be decoupled; the baseline runs implicitly");

  ValidatedKernel kernel = validate_kernel(rs.preset.kernel);
  const std::string name = cfg.name.empty() ? kernel.name() : cfg.name;

  std::filesystem::create_directories(cfg.out_dir);
  ScenarioOutput out;
  out.csv_path = cfg.out_dir + "/" + name + ".csv";
  out.summary_path = cfg.out_dir + "/" + name + "_summary.txt";

  SweepResult sweep = sweep_granularity(kernel, rs.machine, rs.granularities, sync, rs.threads);

  std::ofstream csv(out.csv_path);
  if (!csv) fail(ErrCode::ConfigError, "cannot write '" + out.csv_path + "'");
  csv << metrics_csv_header() << "\n";

  std::ostringstream summary;
  summary << "kernel " << kernel.name() << "  N=" << kernel.iterations() << "  invocations="
          << kernel.invocations() << "  policy=" << sync_variant_name(sync.variant)
          << "  threads=" << thread_model_name(rs.threads) << "  seed=" << cfg.seed << "\n";
  RegionCounters base_inner;
  for (const SliceCycles& s : sweep.baseline.per_slice) {
    base_inner.cycles += s.cycles;
    base_inner.retired_instructions += s.retired;
  }
  summary << "baseline inner-loop IPC " << fmt("%.4f", ipc(base_inner)) << ", runtime "
          << fmt("%.0f", ns_from_fs(sweep.baseline.timeline.end_time)) << " ns\n";
  summary << "\n   g      IPC speedup   slowdown   little_frac   sync_ms\n";

  for (const SweepEntry& e : sweep.entries) {
    RunMetrics m = compute_metrics(e.run, sweep.baseline, rs.machine, cfg.quantized_counters);
    m.instruction_overhead = instruction_overhead(make_phase_pair(chunk(kernel, e.granularity)));
    csv << metrics_csv_row(kernel.name(), kernel.iterations(), kernel.invocations(),
                           e.granularity, sync, rs.threads, cfg.seed, m)
        << "\n";
    char row[160];
    std::snprintf(row, sizeof row, "%8lld   %9.4f   %8.4f   %11.4f   %9.3f\n",
                  static_cast<long long>(e.granularity), m.ipc_speedup, m.slowdown,
                  m.little_time_fraction, m.sync_ns / 1e6);
    summary << row;
    if (m.ipc_speedup > out.best_ipc_speedup) {
      out.best_ipc_speedup = m.ipc_speedup;
      out.best_granularity = e.granularity;
    }
    std::string tl_path =
        cfg.out_dir + "/" + name + "_g" + std::to_string(e.granularity) + "_timeline.json";
    std::ofstream tl(tl_path);
    tl << e.run.timeline.to_json();
    out.timeline_paths.push_back(tl_path);
  }
  summary << "\npeak IPC speedup " << fmt("%.4f", out.best_ipc_speedup) << " at granularity "
          << out.best_granularity << "\n";
  std::ofstream sum(out.summary_path);
  sum << summary.str();
  return out;
}

std::vector<PolicyComparison> compare_policies(const ValidatedKernel& kernel,
                                               const MachineConfig& machine, int64_t granularity,
                                               const ThreadModel& threads, uint64_t seed,
                                               int64_t hybrid_period) {
  std::vector<PolicyComparison> rows;
  ChunkedKernel chunked = chunk(kernel, granularity);
  PhasePair pair = make_phase_pair(chunked);
  RunResult baseline = run_coupled(chunked, machine);

  SyncPolicy lockstep = SyncPolicy::lockstep();
  lockstep.rng_seed = seed;
  RunResult ls = run_dae(pair, machine, lockstep, threads);

  // Derive "perfect" sleeps from the lock-step run: each phase waits the
  // other's worst-case slice time (inner + outer bookkeeping).
  TimeFs max_access = 0, max_execute = 0;
  for (const Interval& iv : ls.timeline.intervals) {
    if (iv.tag == IntervalTag::AccessInner) max_access = std::max(max_access, iv.end - iv.begin);
    if (iv.tag == IntervalTag::ExecuteInner)
      max_execute = std::max(max_execute, iv.end - iv.begin);
  }
  const TimeFs outer_little =
      machine.costs.loop_overhead_ops * machine.little.core.period_fs();
  const TimeFs outer_big = machine.costs.loop_overhead_ops * machine.big.core.period_fs();
  int64_t sleep_execute_ns = (max_access + outer_little + kFsPerNs - 1) / kFsPerNs;
  int64_t sleep_access_ns = (max_execute + outer_big + kFsPerNs - 1) / kFsPerNs;

  SyncPolicy timed = SyncPolicy::timed(sleep_access_ns, sleep_execute_ns, 0, seed);
  RunResult td = run_dae(pair, machine, timed, threads);

  SyncPolicy hybrid =
      SyncPolicy::hybrid(hybrid_period, sleep_access_ns, sleep_execute_ns, 0, seed);
  RunResult hy = run_dae(pair, machine, hybrid, threads);

  rows.push_back({"coupled", compute_metrics(baseline, baseline, machine)});
  rows.push_back({"lockstep", compute_metrics(ls, baseline, machine)});
  rows.push_back({"timed", compute_metrics(td, baseline, machine)});
  rows.push_back({"hybrid", compute_metrics(hy, baseline, machine)});
  return rows;
}

std::string policy_table_text(const std::vector<PolicyComparison>& rows) {
  std::ostringstream o;
  o << "policy      runtime_ms   slowdown   exec_ipc   ipc_speedup   sync_ms   sleep_ms\n";
  for (const auto& r : rows) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-10s %11.3f %10.4f %10.4f %13.4f %9.3f %10.3f\n",
                  r.policy.c_str(), r.metrics.total_runtime_ns / 1e6, r.metrics.slowdown,
                  r.metrics.execute_ipc, r.metrics.ipc_speedup, r.metrics.sync_ns / 1e6,
                  r.metrics.sleep_ns / 1e6);
    o << buf;
  }
  return o.str();
}

}  // namespace dae
