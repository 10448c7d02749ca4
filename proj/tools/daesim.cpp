// daesim: decoupled access-execute simulator for a big.LITTLE-style machine.
//
//   daesim run <scenario.cfg> [--seed N] [--out-dir DIR] [--quantized-counters]
//   daesim sweep --kernel <preset|file> [--g 64,256,...] [--policy lockstep] ...
//   daesim oracle-check --kernel <preset|file> [--n N] [--g ...] [--policy ...]
//   daesim compare-policies --kernel <preset|file> --g N [...]
//   daesim dump --kernel <preset|file> --g N
//
// Exit codes: 0 success, 2 validation/config error, 3 oracle mismatch.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "dae/kernel_text.hpp"
#include "dae/oracle.hpp"
#include "dae/report.hpp"
#include "dae/transform.hpp"

namespace {

using namespace dae;

struct CommonArgs {
  std::string kernel_ref;
  int64_t n = 0;
  int64_t invocations = 0;
  std::string machine_path;
  std::vector<int64_t> granularities;
  std::string policy = "lockstep";
  int64_t sleep_access_ns = 0;
  int64_t sleep_execute_ns = 0;
  double jitter_ns = 0;
  int64_t resync_period = 8;
  double lead_fraction = 1.0;
  std::string threads;
  uint64_t seed = 0;
  std::string out_dir = ".";
  bool quantized = false;
};

void add_common(CLI::App* cmd, CommonArgs* a) {
  cmd->add_option("--kernel", a->kernel_ref, "preset name or kernel file")->required();
  cmd->add_option("--n", a->n, "iteration count override");
  cmd->add_option("--invocations", a->invocations, "outer repetition override");
  cmd->add_option("--machine", a->machine_path, "machine config file");
  cmd->add_option("--g", a->granularities, "granularity list")->delimiter(',');
  cmd->add_option("--policy", a->policy, "coupled|lockstep|timed|hybrid");
  cmd->add_option("--sleep-access-ns", a->sleep_access_ns);
  cmd->add_option("--sleep-execute-ns", a->sleep_execute_ns);
  cmd->add_option("--jitter-ns", a->jitter_ns);
  cmd->add_option("--resync-period", a->resync_period);
  cmd->add_option("--lead-fraction", a->lead_fraction);
  cmd->add_option("--threads", a->threads, "spawn|pool");
  cmd->add_option("--seed", a->seed);
  cmd->add_option("--out-dir", a->out_dir);
  cmd->add_flag("--quantized-counters", a->quantized);
}

ScenarioConfig to_scenario(const CommonArgs& a) {
  ScenarioConfig cfg;
  cfg.kernel_ref = a.kernel_ref;
  cfg.n_override = a.n;
  cfg.invocations_override = a.invocations;
  cfg.machine_path = a.machine_path;
  cfg.granularities = a.granularities;
  cfg.sync.variant = sync_variant_from_name(a.policy);
  cfg.sync.sleep_access_ns = a.sleep_access_ns;
  cfg.sync.sleep_execute_ns = a.sleep_execute_ns;
  cfg.sync.jitter_stddev_ns = a.jitter_ns;
  cfg.sync.resync_period_slices = a.resync_period;
  cfg.sync.lead_fraction = a.lead_fraction;
  if (!a.threads.empty()) {
    cfg.threads_set = true;
    cfg.threads = a.threads == "pool" ? ThreadModel::pool() : ThreadModel::spawn();
  }
  cfg.seed = a.seed;
  cfg.out_dir = a.out_dir;
  cfg.quantized_counters = a.quantized;
  return cfg;
}

int cmd_run(const std::string& path, uint64_t seed, bool seed_set, const std::string& out_dir,
            bool out_set, bool quantized) {
  ScenarioConfig cfg = load_scenario_file(path);
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.out_dir = out_dir;
  if (quantized) cfg.quantized_counters = true;
  ScenarioOutput out = run_scenario(cfg);
  std::printf("wrote %s\n", out.csv_path.c_str());
  std::printf("wrote %s\n", out.summary_path.c_str());
  std::printf("peak IPC speedup %.4f at g=%lld\n", out.best_ipc_speedup,
              static_cast<long long>(out.best_granularity));
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  ScenarioOutput out = run_scenario(to_scenario(a));
  std::printf("wrote %s\n", out.csv_path.c_str());
  std::printf("peak IPC speedup %.4f at g=%lld\n", out.best_ipc_speedup,
              static_cast<long long>(out.best_granularity));
  return 0;
}

int cmd_oracle_check(const CommonArgs& a) {
  ScenarioConfig cfg = to_scenario(a);
  ResolvedScenario rs = resolve_scenario(cfg);
  cfg.sync.rng_seed = cfg.seed;
  ValidatedKernel kernel = validate_kernel(rs.preset.kernel);
  bool ok = true;
  for (int64_t g : rs.granularities) {
    std::string diff = oracle_diff(kernel, rs.machine, cfg.sync, rs.threads, g);
    if (diff.empty()) {
      std::printf("g=%-8lld OK\n", static_cast<long long>(g));
    } else {
      std::printf("g=%-8lld MISMATCH: %s\n", static_cast<long long>(g), diff.c_str());
      ok = false;
    }
  }
  return ok ? 0 : 3;
}

int cmd_compare(const CommonArgs& a) {
  ScenarioConfig cfg = to_scenario(a);
  ResolvedScenario rs = resolve_scenario(cfg);
  ValidatedKernel kernel = validate_kernel(rs.preset.kernel);
  int64_t g = rs.granularities.front();
  auto rows = compare_policies(kernel, rs.machine, g, rs.threads, cfg.seed, a.resync_period);
  std::printf("kernel %s  N=%lld  g=%lld\n", kernel.name().c_str(),
              static_cast<long long>(kernel.iterations()), static_cast<long long>(g));
  std::fputs(policy_table_text(rows).c_str(), stdout);
  return 0;
}

int cmd_dump(const CommonArgs& a) {
  ScenarioConfig cfg = to_scenario(a);
  ResolvedScenario rs = resolve_scenario(cfg);
  ValidatedKernel kernel = validate_kernel(rs.preset.kernel);
  int64_t g = rs.granularities.front();
  std::fputs(dump_phases(make_phase_pair(chunk(kernel, g))).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decoupled access-execute big.LITTLE simulator"};
  app.require_subcommand(1);

  std::string scenario_path, run_out_dir;
  uint64_t run_seed = 0;
  bool run_quantized = false;
  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", run_seed);
  CLI::Option* out_opt = run->add_option("--out-dir", run_out_dir);
  run->add_flag("--quantized-counters", run_quantized);

  CommonArgs sweep_args, oracle_args, cmp_args, dump_args;
  CLI::App* sweep = app.add_subcommand("sweep", "granularity sweep with inline flags");
  add_common(sweep, &sweep_args);
  CLI::App* oracle = app.add_subcommand("oracle-check", "engine vs brute-force oracle");
  add_common(oracle, &oracle_args);
  CLI::App* cmp = app.add_subcommand("compare-policies", "policy comparison table");
  add_common(cmp, &cmp_args);
  CLI::App* dump = app.add_subcommand("dump", "print derived access/execute phases");
  add_common(dump, &dump_args);

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(scenario_path, run_seed, seed_opt->count() > 0, run_out_dir,
                     out_opt->count() > 0, run_quantized);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (oracle->parsed()) return cmd_oracle_check(oracle_args);
    if (cmp->parsed()) return cmd_compare(cmp_args);
    if (dump->parsed()) return cmd_dump(dump_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const dae::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
