#pragma once

#include <vector>

#include "dae/kernel_ir.hpp"
#include "dae/scheduler.hpp"

namespace dae {

// Synthetic stand-ins for the three evaluated workloads. They are analogues
// with matching access characteristics, not the benchmarks themselves.
struct PresetInfo {
  KernelSpec kernel;
  ThreadModel default_threads;
  std::vector<int64_t> default_sweep;
};

std::vector<std::string> preset_names();
bool is_preset_name(const std::string& name);

// n = 0 / invocations = 0 pick the preset defaults. Smaller n instances keep
// the same body and scale the arrays (used by the oracle suites).
PresetInfo make_preset(const std::string& name, int64_t n = 0, int64_t invocations = 0);

}  // namespace dae
