#include "dae/machine.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace dae {

namespace {

void validate_cluster(const char* name, const ClusterConfig& c, int32_t line_bytes) {
  const CoreConfig& core = c.core;
  if (core.frequency_mhz < core.min_frequency_mhz || core.frequency_mhz > core.max_frequency_mhz)
    fail(ErrCode::ConfigError, std::string(name) + ": frequency outside [f_min, f_max]");
  if (core.mlp_degree < 1 || core.issue_width < 1 || core.window < 1)
    fail(ErrCode::ConfigError, std::string(name) + ": issue_width/mlp_degree/window must be >= 1");
  if (core.kind == CoreKind::InOrder && (core.issue_width != 1 || core.mlp_degree != 1))
    fail(ErrCode::ConfigError, std::string(name) + ": in-order cores are fixed at width 1, mlp 1");
  if (c.l1d.size_bytes > c.l2.size_bytes)
    fail(ErrCode::ConfigError, std::string(name) + ": l1d larger than l2");
  if (c.prefetch_queue_depth < 1)
    fail(ErrCode::ConfigError, std::string(name) + ": prefetch_queue_depth must be >= 1");
  for (const CacheConfig* cc : {&c.l1d, &c.l2}) {
    if (cc->size_bytes < static_cast<int64_t>(cc->assoc) * line_bytes || cc->assoc < 1)
      fail(ErrCode::ConfigError, std::string(name) + ": bad cache geometry");
    if (cc->hit_ns < 1) fail(ErrCode::ConfigError, std::string(name) + ": hit latency must be >= 1 ns");
  }
  if (c.l1d.hit_ns >= c.l2.hit_ns)
    fail(ErrCode::ConfigError, std::string(name) + ": l1 hit latency must be below l2");
}

}  // namespace

void MachineConfig::validate() const {
  validate_cluster("big", big, mem.line_bytes);
  validate_cluster("little", little, mem.line_bytes);
  if (mem.line_bytes < 1 || (mem.line_bytes & (mem.line_bytes - 1)) != 0)
    fail(ErrCode::ConfigError, "line_bytes must be a power of two");
  // Latency ordering is the mechanism the whole scheme exploits.
  if (!(mem.coherence_ns < mem.memory_ns))
    fail(ErrCode::ConfigError, "coherence latency must be below memory latency");
  for (const ClusterConfig* c : {&big, &little}) {
    if (!(c->l2.hit_ns < mem.coherence_ns))
      fail(ErrCode::ConfigError, "l2 hit latency must be below coherence latency");
  }
  if (costs.lock_ns < 0 || costs.spawn_join_ns < 0 || costs.signal_ns < 0 ||
      costs.loop_overhead_ops < 0)
    fail(ErrCode::ConfigError, "sync costs must be >= 0");
  if (power.big_active_mw <= power.little_active_mw)
    fail(ErrCode::ConfigError, "big active power must exceed LITTLE active power");
  if (power.big_idle_mw < 0 || power.little_idle_mw < 0)
    fail(ErrCode::ConfigError, "idle power must be >= 0");
  if (counters.cycle_divider < 1) fail(ErrCode::ConfigError, "cycle divider must be >= 1");
}

MachineConfig default_machine() {
  MachineConfig m;

  m.big.core.kind = CoreKind::OutOfOrder;
  m.big.core.frequency_mhz = 2000;
  m.big.core.min_frequency_mhz = 200;
  m.big.core.max_frequency_mhz = 2000;
  m.big.core.issue_width = 3;
  m.big.core.mlp_degree = 6;
  m.big.core.window = 96;
  m.big.l1d = {32 * 1024, 2, 2};
  m.big.l2 = {2 * 1024 * 1024, 16, 8};
  m.big.prefetch_queue_depth = 8;

  m.little.core.kind = CoreKind::InOrder;
  m.little.core.frequency_mhz = 1400;
  m.little.core.min_frequency_mhz = 200;
  m.little.core.max_frequency_mhz = 1400;
  m.little.core.issue_width = 1;
  m.little.core.mlp_degree = 1;
  m.little.core.window = 1;
  m.little.l1d = {32 * 1024, 4, 2};
  m.little.l2 = {512 * 1024, 8, 8};
  m.little.prefetch_queue_depth = 4;

  m.mem.coherence_ns = 35;
  m.mem.memory_ns = 95;
  m.mem.line_bytes = 64;

  m.costs.lock_ns = 1500;
  m.costs.spawn_join_ns = 30000;
  m.costs.signal_ns = 200;
  m.costs.loop_overhead_ops = 2;

  return m;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KV {
  std::string section, key, value;
  int lineno;
};

std::vector<KV> parse_kv(const std::string& text, const std::string& origin) {
  std::vector<KV> out;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrCode::ParseError, origin + ":" + std::to_string(lineno) + ": expected key = value");
    out.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return out;
}

int64_t kv_int(const KV& kv, const std::string& origin) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(kv.value, &pos, 0);
    if (pos != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    fail(ErrCode::ParseError,
         origin + ":" + std::to_string(kv.lineno) + ": expected integer for '" + kv.key + "'");
  }
}

double kv_double(const KV& kv, const std::string& origin) {
  try {
    return std::stod(kv.value);
  } catch (const std::exception&) {
    fail(ErrCode::ParseError,
         origin + ":" + std::to_string(kv.lineno) + ": expected number for '" + kv.key + "'");
  }
}

void parse_cache(const KV& kv, CacheConfig* cc, const std::string& origin) {
  std::istringstream is(kv.value);
  int64_t size;
  int32_t assoc;
  int64_t hit;
  if (!(is >> size >> assoc >> hit))
    fail(ErrCode::ParseError,
         origin + ":" + std::to_string(kv.lineno) + ": expected '<size> <assoc> <hit_ns>'");
  cc->size_bytes = size;
  cc->assoc = assoc;
  cc->hit_ns = hit;
}

}  // namespace

MachineConfig parse_machine_text(const std::string& text, const std::string& origin) {
  MachineConfig m = default_machine();
  for (const KV& kv : parse_kv(text, origin)) {
    ClusterConfig* cl = nullptr;
    if (kv.section == "big") cl = &m.big;
    if (kv.section == "little") cl = &m.little;
    if (cl != nullptr) {
      if (kv.key == "core") {
        if (kv.value == "in_order") cl->core.kind = CoreKind::InOrder;
        else if (kv.value == "out_of_order") cl->core.kind = CoreKind::OutOfOrder;
        else fail(ErrCode::ParseError, origin + ": unknown core kind '" + kv.value + "'");
      } else if (kv.key == "frequency_mhz") cl->core.frequency_mhz = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "min_frequency_mhz") cl->core.min_frequency_mhz = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "max_frequency_mhz") cl->core.max_frequency_mhz = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "issue_width") cl->core.issue_width = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "mlp_degree") cl->core.mlp_degree = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "window") cl->core.window = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "l1d") parse_cache(kv, &cl->l1d, origin);
      else if (kv.key == "l2") parse_cache(kv, &cl->l2, origin);
      else if (kv.key == "prefetch_queue_depth") cl->prefetch_queue_depth = static_cast<int32_t>(kv_int(kv, origin));
      else fail(ErrCode::ParseError, origin + ": unknown key '" + kv.key + "' in [" + kv.section + "]");
    } else if (kv.section == "memory") {
      if (kv.key == "coherence_ns") m.mem.coherence_ns = kv_int(kv, origin);
      else if (kv.key == "memory_ns") m.mem.memory_ns = kv_int(kv, origin);
      else if (kv.key == "line_bytes") m.mem.line_bytes = static_cast<int32_t>(kv_int(kv, origin));
      else fail(ErrCode::ParseError, origin + ": unknown key '" + kv.key + "' in [memory]");
    } else if (kv.section == "costs") {
      if (kv.key == "lock_ns") m.costs.lock_ns = kv_int(kv, origin);
      else if (kv.key == "spawn_join_ns") m.costs.spawn_join_ns = kv_int(kv, origin);
      else if (kv.key == "signal_ns") m.costs.signal_ns = kv_int(kv, origin);
      else if (kv.key == "loop_overhead_ops") m.costs.loop_overhead_ops = static_cast<int32_t>(kv_int(kv, origin));
      else fail(ErrCode::ParseError, origin + ": unknown key '" + kv.key + "' in [costs]");
    } else if (kv.section == "power") {
      if (kv.key == "big_active_mw") m.power.big_active_mw = kv_double(kv, origin);
      else if (kv.key == "big_idle_mw") m.power.big_idle_mw = kv_double(kv, origin);
      else if (kv.key == "little_active_mw") m.power.little_active_mw = kv_double(kv, origin);
      else if (kv.key == "little_idle_mw") m.power.little_idle_mw = kv_double(kv, origin);
      else fail(ErrCode::ParseError, origin + ": unknown key '" + kv.key + "' in [power]");
    } else if (kv.section == "counters") {
      if (kv.key == "cycle_divider") m.counters.cycle_divider = static_cast<int32_t>(kv_int(kv, origin));
      else if (kv.key == "counter_width_bits") m.counters.counter_width_bits = static_cast<int32_t>(kv_int(kv, origin));
      else fail(ErrCode::ParseError, origin + ": unknown key '" + kv.key + "' in [counters]");
    } else {
      fail(ErrCode::ParseError, origin + ": unknown section [" + kv.section + "]");
    }
  }
  m.validate();
  return m;
}

MachineConfig load_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrCode::ConfigError, "cannot open machine config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_machine_text(ss.str(), path);
}

std::string machine_to_text(const MachineConfig& m) {
  std::ostringstream out;
  auto emit_cluster = [&](const char* name, const ClusterConfig& c) {
    out << "[" << name << "]\n";
    out << "core = " << (c.core.kind == CoreKind::InOrder ? "in_order" : "out_of_order") << "\n";
    out << "frequency_mhz = " << c.core.frequency_mhz << "\n";
    out << "min_frequency_mhz = " << c.core.min_frequency_mhz << "\n";
    out << "max_frequency_mhz = " << c.core.max_frequency_mhz << "\n";
    out << "issue_width = " << c.core.issue_width << "\n";
    out << "mlp_degree = " << c.core.mlp_degree << "\n";
    out << "window = " << c.core.window << "\n";
    out << "l1d = " << c.l1d.size_bytes << " " << c.l1d.assoc << " " << c.l1d.hit_ns << "\n";
    out << "l2 = " << c.l2.size_bytes << " " << c.l2.assoc << " " << c.l2.hit_ns << "\n";
    out << "prefetch_queue_depth = " << c.prefetch_queue_depth << "\n\n";
  };
  emit_cluster("big", m.big);
  emit_cluster("little", m.little);
  out << "[memory]\n";
  out << "coherence_ns = " << m.mem.coherence_ns << "\n";
  out << "memory_ns = " << m.mem.memory_ns << "\n";
  out << "line_bytes = " << m.mem.line_bytes << "\n\n";
  out << "[costs]\n";
  out << "lock_ns = " << m.costs.lock_ns << "\n";
  out << "spawn_join_ns = " << m.costs.spawn_join_ns << "\n";
  out << "signal_ns = " << m.costs.signal_ns << "\n";
  out << "loop_overhead_ops = " << m.costs.loop_overhead_ops << "\n\n";
  out << "[power]\n";
  out << "big_active_mw = " << m.power.big_active_mw << "\n";
  out << "big_idle_mw = " << m.power.big_idle_mw << "\n";
  out << "little_active_mw = " << m.power.little_active_mw << "\n";
  out << "little_idle_mw = " << m.power.little_idle_mw << "\n\n";
  out << "[counters]\n";
  out << "cycle_divider = " << m.counters.cycle_divider << "\n";
  out << "counter_width_bits = " << m.counters.counter_width_bits << "\n";
  return out.str();
}

}  // namespace dae
