#include "dae/presets.hpp"

#include <algorithm>
#include <numeric>

namespace dae {

namespace {

// Multiplier for an affine index permutation: odd, coprime to n, near the
// golden ratio so consecutive values land far apart (no line reuse).
int64_t perm_multiplier(int64_t n) {
  int64_t a = static_cast<int64_t>(0.6180339887 * static_cast<double>(n)) | 1;
  while (std::gcd(a, n) != 1) a += 2;
  return a;
}

ArrayDecl array(const std::string& name, int32_t elem, int64_t length) {
  ArrayDecl a;
  a.name = name;
  a.elem_size = elem;
  a.length = length;
  return a;
}

ArrayDecl perm_array(const std::string& name, int32_t elem, int64_t length, int64_t add) {
  ArrayDecl a = array(name, elem, length);
  a.contents.kind = ArrayContents::Kind::AffinePerm;
  a.contents.mul = perm_multiplier(length);
  a.contents.add = add;
  return a;
}

Instr calc(InstrId id, int32_t cost, std::vector<InstrId> in = {}) {
  Instr i;
  i.id = id;
  i.kind = InstrKind::AddrCalc;
  i.cost_ops = cost;
  i.inputs = std::move(in);
  return i;
}

Instr load(InstrId id, int32_t arr, InstrId calc_id, InstrId source = kNoInstr,
           int32_t byte_offset = 0) {
  Instr i;
  i.id = id;
  i.kind = InstrKind::Load;
  i.addr.array = arr;
  i.addr.calc = calc_id;
  i.addr.source = source;
  i.addr.scale = source == kNoInstr ? 1 : 1;
  i.addr.byte_offset = byte_offset;
  return i;
}

Instr compute(InstrId id, int32_t cost, std::vector<InstrId> in, int32_t pred = -1) {
  Instr i;
  i.id = id;
  i.kind = InstrKind::Compute;
  i.cost_ops = cost;
  i.inputs = std::move(in);
  i.pred = pred;
  return i;
}

Instr store(InstrId id, int32_t arr, InstrId calc_id, std::vector<InstrId> val,
            InstrId source = kNoInstr, int32_t byte_offset = 0, int32_t pred = -1) {
  Instr i;
  i.id = id;
  i.kind = InstrKind::Store;
  i.addr.array = arr;
  i.addr.calc = calc_id;
  i.addr.source = source;
  i.addr.byte_offset = byte_offset;
  i.inputs = std::move(val);
  i.pred = pred;
  return i;
}

std::vector<int64_t> clamp_sweep(std::vector<int64_t> sweep, int64_t n) {
  std::vector<int64_t> out;
  for (int64_t g : sweep)
    if (g <= n) out.push_back(g);
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

// Streaming collision kernel: per cell one 64-byte neighbour descriptor read
// (six offsets), six permuted double gathers, a heavy arithmetic block with
// two data-independent conditional variants, one streaming store.
//
// Sizing (defaults, n = 49152): nbr 64B*n = 3 MB, six f64 lanes 384 kB each
// = 2.25 MB, out 384 kB; total ~5.8 MB >> 2 MB big L2, so every fresh line
// comes from DRAM in the baseline. A slice of g iterations prefetches
// 6g lines = 384g bytes; g <= 1024 fits the 512 kB LITTLE L2.
PresetInfo lbm_like(int64_t n, int64_t invocations) {
  PresetInfo p;
  KernelSpec& k = p.kernel;
  k.name = "lbm_like";
  k.iteration_count = n;
  k.invocations = invocations;
  k.predicates = {{"bounce", 0.55}, {"stream", 0.45}};
  k.arrays.push_back(perm_array("nbr", 64, n, 1));
  for (int d = 0; d < 6; ++d) k.arrays.push_back(array("d" + std::to_string(d), 8, n));
  k.arrays.push_back(array("out", 8, n));

  const int32_t nbr = 0;
  InstrId id = 0;
  InstrId addr_nbr = id;
  k.body.push_back(calc(id++, 1));
  InstrId off[6];
  for (int d = 0; d < 6; ++d) {
    off[d] = id;
    k.body.push_back(load(id++, nbr, addr_nbr, kNoInstr, 8 * d));
  }
  InstrId gathers[6];
  for (int d = 0; d < 6; ++d) {
    InstrId c = id;
    k.body.push_back(calc(id++, 2, {off[d]}));
    gathers[d] = id;
    k.body.push_back(load(id++, 1 + d, c, off[d]));
  }
  InstrId collide = id;
  k.body.push_back(compute(id++, 24,
                           {gathers[0], gathers[1], gathers[2], gathers[3], gathers[4],
                            gathers[5]}));
  k.body.push_back(compute(id++, 10, {collide}, 0));
  k.body.push_back(compute(id++, 8, {collide}, 1));
  InstrId addr_out = id;
  k.body.push_back(calc(id++, 1));
  k.body.push_back(store(id++, 7, addr_out, {collide}));

  p.default_threads = ThreadModel::spawn();
  p.default_sweep = clamp_sweep({256, 512, 1024, 2048, 4096, 8192}, n);
  return p;
}

// Indirect selection kernel: a permuted index stream picks 64-byte candidate
// records, two fields are compared, and a second permuted stream drives a
// read-modify-write swap of ranking slots (conditional store).
//
// Sizing (defaults, n = 65536): idx/sw 512 kB each, pop 64B*n = 4 MB,
// best 512 kB; total ~5.5 MB. Two irregular lines per iteration.
PresetInfo cigar_like(int64_t n, int64_t invocations) {
  PresetInfo p;
  KernelSpec& k = p.kernel;
  k.name = "cigar_like";
  k.iteration_count = n;
  k.invocations = invocations;
  k.predicates = {{"swap", 0.5}, {"keep", 0.5}};
  k.arrays.push_back(perm_array("idx", 8, n, 3));
  k.arrays.push_back(array("pop", 64, n));
  k.arrays.push_back(perm_array("sw", 8, n, 7));
  k.arrays.push_back(array("best", 8, n));

  InstrId id = 0;
  InstrId c0 = id;
  k.body.push_back(calc(id++, 1));
  InstrId idx = id;
  k.body.push_back(load(id++, 0, c0));
  InstrId c1 = id;
  k.body.push_back(calc(id++, 2, {idx}));
  InstrId fit_a = id;
  k.body.push_back(load(id++, 1, c1, idx, 0));
  InstrId fit_b = id;
  k.body.push_back(load(id++, 1, c1, idx, 32));
  InstrId cmp = id;
  k.body.push_back(compute(id++, 4, {fit_a, fit_b}));
  InstrId c2 = id;
  k.body.push_back(calc(id++, 1));
  InstrId sw = id;
  k.body.push_back(load(id++, 2, c2));
  InstrId c3 = id;
  k.body.push_back(calc(id++, 1, {sw}));
  InstrId slot = id;
  k.body.push_back(load(id++, 3, c3, sw));
  InstrId upd = id;
  k.body.push_back(compute(id++, 2, {cmp, slot}));
  k.body.push_back(store(id++, 3, c3, {upd}, sw, 0, 0));
  k.body.push_back(compute(id++, 2, {cmp}, 1));

  p.default_threads = ThreadModel::spawn();
  p.default_sweep = clamp_sweep({256, 512, 1024, 2048, 4096, 8192}, n);
  return p;
}

// Unit-stride toggle kernel: one struct-member load, one XOR, one store back,
// every iteration, sequentially through a 16-byte record array.
//
// Sizing (defaults, n = 262144): reg 16B*n = 4 MB > 2 MB big L2; four
// records share a cache line, so one line fill covers four iterations.
PresetInfo libquantum_like(int64_t n, int64_t invocations) {
  PresetInfo p;
  KernelSpec& k = p.kernel;
  k.name = "libquantum_like";
  k.iteration_count = n;
  k.invocations = invocations;
  k.arrays.push_back(array("reg", 16, n));

  InstrId id = 0;
  InstrId c0 = id;
  k.body.push_back(calc(id++, 1));
  InstrId state = id;
  k.body.push_back(load(id++, 0, c0, kNoInstr, 8));
  InstrId flip = id;
  k.body.push_back(compute(id++, 1, {state}));
  k.body.push_back(store(id++, 0, c0, {flip}, kNoInstr, 8));

  p.default_threads = ThreadModel::pool();
  p.default_sweep = clamp_sweep({1024, 4096, 16384, 65536}, n);
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"lbm_like", "cigar_like", "libquantum_like"};
}

bool is_preset_name(const std::string& name) {
  auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

PresetInfo make_preset(const std::string& name, int64_t n, int64_t invocations) {
  if (name == "lbm_like") {
    // The target loop re-runs per benchmark input step.
    return lbm_like(n > 0 ? n : 49152, invocations > 0 ? invocations : 10);
  }
  if (name == "cigar_like") {
    return cigar_like(n > 0 ? n : 65536, invocations > 0 ? invocations : 1);
  }
  if (name == "libquantum_like") {
    return libquantum_like(n > 0 ? n : 262144, invocations > 0 ? invocations : 4);
  }
  fail(ErrCode::ConfigError, "unknown preset '" + name + "'");
}

}  // namespace dae
