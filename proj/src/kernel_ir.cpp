#include "dae/kernel_ir.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace dae {

namespace {

std::string instr_ref(const Instr& ins) {
  return std::string(instr_kind_name(ins.kind)) + " #" + std::to_string(ins.id);
}

// Deterministic, seed-free per-iteration predicate: Fibonacci hash of the
// iteration index compared against probability * 2^32.
bool hash_taken(int64_t iteration, double probability) {
  uint32_t h = static_cast<uint32_t>(static_cast<uint64_t>(iteration) * 0x9E3779B9ULL);
  double t = probability * 4294967296.0;
  if (t >= 4294967296.0) return true;
  if (t <= 0.0) return false;
  return h < static_cast<uint32_t>(t);
}

struct ValueRange {
  int64_t lo = 0;
  int64_t hi = 0;  // inclusive
};

ValueRange contents_range(const ArrayDecl& a) {
  switch (a.contents.kind) {
    case ArrayContents::Kind::Sequential:
    case ArrayContents::Kind::AffinePerm:
      return {0, a.length - 1};
    case ArrayContents::Kind::Explicit: {
      ValueRange r{a.contents.values.front(), a.contents.values.front()};
      for (int64_t v : a.contents.values) {
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
      return r;
    }
    case ArrayContents::Kind::None:
      break;
  }
  return {0, 0};
}

}  // namespace

const char* instr_kind_name(InstrKind k) {
  switch (k) {
    case InstrKind::AddrCalc: return "calc";
    case InstrKind::Load: return "load";
    case InstrKind::Store: return "store";
    case InstrKind::Compute: return "compute";
    case InstrKind::Prefetch: return "prefetch";
  }
  return "?";
}

const char* access_kind_name(AccessKind k) {
  switch (k) {
    case AccessKind::Load: return "load";
    case AccessKind::Store: return "store";
    case AccessKind::Prefetch: return "prefetch";
  }
  return "?";
}

int64_t array_value(const ArrayDecl& array, int64_t index) {
  switch (array.contents.kind) {
    case ArrayContents::Kind::Sequential:
      return index;
    case ArrayContents::Kind::AffinePerm:
      return (array.contents.mul * index + array.contents.add) % array.length;
    case ArrayContents::Kind::Explicit:
      return array.contents.values[static_cast<size_t>(index)];
    case ArrayContents::Kind::None:
      break;
  }
  fail(ErrCode::OutOfBoundsAddress,
       "array '" + array.name + "' has no declared contents; cannot resolve indirection");
}

int32_t ValidatedKernel::position_of(InstrId id) const {
  return pos_[static_cast<size_t>(id)];
}

const Instr& ValidatedKernel::instr_by_id(InstrId id) const {
  return spec_.body[static_cast<size_t>(position_of(id))];
}

bool ValidatedKernel::predicate_taken(const Instr& ins, int64_t iteration) const {
  if (ins.pred < 0) return true;
  return hash_taken(iteration, spec_.predicates[static_cast<size_t>(ins.pred)].probability);
}

int64_t ValidatedKernel::load_value(InstrId load_id, int64_t iteration) const {
  const Instr& ld = instr_by_id(load_id);
  const ArrayDecl& arr = spec_.arrays[static_cast<size_t>(ld.addr.array)];
  return array_value(arr, element_index(ld.addr, iteration));
}

int64_t ValidatedKernel::element_index(const AddressExpr& a, int64_t iteration) const {
  int64_t x = a.source == kNoInstr ? iteration : load_value(a.source, iteration);
  return a.scale * x + a.offset;
}

uint64_t ValidatedKernel::byte_address(const AddressExpr& a, int64_t iteration) const {
  const ArrayDecl& arr = spec_.arrays[static_cast<size_t>(a.array)];
  int64_t idx = element_index(a, iteration);
  return arr.base + static_cast<uint64_t>(idx) * static_cast<uint64_t>(arr.elem_size) +
         static_cast<uint64_t>(a.byte_offset);
}

int64_t ValidatedKernel::dynamic_ops() const {
  int64_t total = 0;
  for (int64_t i = 0; i < spec_.iteration_count; ++i) {
    for (const Instr& ins : spec_.body) {
      if (!predicate_taken(ins, i)) continue;
      total += ins.is_memory() ? 1 : ins.cost_ops;
    }
  }
  return total;
}

ValidatedKernel validate_kernel(KernelSpec kernel, bool allow_prefetch) {
  if (kernel.iteration_count < 1)
    fail(ErrCode::ConfigError, "kernel '" + kernel.name + "': iteration_count must be >= 1");
  if (kernel.invocations < 1)
    fail(ErrCode::ConfigError, "kernel '" + kernel.name + "': invocations must be >= 1");
  // Derived access phases may legitimately be empty (degenerate pairs);
  // user-authored kernels may not.
  if (kernel.body.empty() && !allow_prefetch)
    fail(ErrCode::ConfigError, "kernel '" + kernel.name + "': body is empty");

  // Array declarations: unique names, sane geometry, non-overlapping ranges.
  std::unordered_map<std::string, int32_t> array_index;
  for (size_t k = 0; k < kernel.arrays.size(); ++k) {
    ArrayDecl& a = kernel.arrays[k];
    if (a.length < 1 || a.elem_size < 1)
      fail(ErrCode::ConfigError, "array '" + a.name + "': bad geometry");
    if (!array_index.emplace(a.name, static_cast<int32_t>(k)).second)
      fail(ErrCode::ConfigError, "array '" + a.name + "' declared twice");
    if (a.contents.kind == ArrayContents::Kind::Explicit &&
        static_cast<int64_t>(a.contents.values.size()) != a.length)
      fail(ErrCode::ConfigError, "array '" + a.name + "': explicit contents length mismatch");
    if (a.contents.kind == ArrayContents::Kind::AffinePerm && a.contents.mul <= 0)
      fail(ErrCode::ConfigError, "array '" + a.name + "': perm multiplier must be positive");
  }
  // Auto bases: pack line-aligned with a guard line between arrays.
  uint64_t next_base = 0x100000;
  for (ArrayDecl& a : kernel.arrays) {
    uint64_t bytes = static_cast<uint64_t>(a.length) * static_cast<uint64_t>(a.elem_size);
    if (a.base == 0) {
      a.base = next_base;
      next_base = (a.base + bytes + 127) & ~63ULL;
    }
  }
  for (size_t i = 0; i < kernel.arrays.size(); ++i) {
    for (size_t j = i + 1; j < kernel.arrays.size(); ++j) {
      const ArrayDecl& a = kernel.arrays[i];
      const ArrayDecl& b = kernel.arrays[j];
      uint64_t a_end = a.base + static_cast<uint64_t>(a.length) * a.elem_size;
      uint64_t b_end = b.base + static_cast<uint64_t>(b.length) * b.elem_size;
      if (a.base < b_end && b.base < a_end)
        fail(ErrCode::ConfigError, "arrays '" + a.name + "' and '" + b.name + "' overlap");
    }
  }

  // Instruction ids: unique, then densified to 0..n-1 preserving body order.
  std::unordered_map<InstrId, InstrId> remap;
  for (size_t p = 0; p < kernel.body.size(); ++p) {
    Instr& ins = kernel.body[p];
    if (ins.id == kNoInstr) ins.id = static_cast<InstrId>(p);
    if (!remap.emplace(ins.id, static_cast<InstrId>(p)).second)
      fail(ErrCode::ConfigError, "duplicate instruction id " + std::to_string(ins.id));
  }
  auto remap_ref = [&](InstrId& id, const Instr& user) {
    if (id == kNoInstr) return;
    auto it = remap.find(id);
    if (it == remap.end() || it->second >= remap.at(user.id))
      fail(ErrCode::UseBeforeDef,
           instr_ref(user) + " references #" + std::to_string(id) + " before its definition");
    id = it->second;
  };
  for (Instr& ins : kernel.body) {
    for (InstrId& in : ins.inputs) remap_ref(in, ins);
    remap_ref(ins.addr.source, ins);
    remap_ref(ins.addr.calc, ins);
  }
  for (size_t p = 0; p < kernel.body.size(); ++p) kernel.body[p].id = static_cast<InstrId>(p);

  // Per-instruction structural checks.
  for (const Instr& ins : kernel.body) {
    if (ins.kind == InstrKind::Prefetch && !allow_prefetch)
      fail(ErrCode::ConfigError, instr_ref(ins) + ": prefetch is not allowed in source kernels");
    if (!ins.is_memory() && ins.cost_ops < 1)
      fail(ErrCode::ConfigError, instr_ref(ins) + ": cost_ops must be >= 1");
    if (ins.pred >= static_cast<int32_t>(kernel.predicates.size()))
      fail(ErrCode::ConfigError, instr_ref(ins) + ": unknown predicate");
    if (ins.is_memory()) {
      if (ins.addr.array < 0 || ins.addr.array >= static_cast<int32_t>(kernel.arrays.size()))
        fail(ErrCode::UnknownArray, instr_ref(ins) + ": unknown array in address");
      if (ins.addr.calc != kNoInstr &&
          kernel.body[static_cast<size_t>(ins.addr.calc)].kind != InstrKind::AddrCalc)
        fail(ErrCode::ConfigError, instr_ref(ins) + ": addr.calc must name an AddrCalc");
      if (ins.addr.source != kNoInstr) {
        const Instr& src = kernel.body[static_cast<size_t>(ins.addr.source)];
        if (src.kind != InstrKind::Load)
          fail(ErrCode::ConfigError, instr_ref(ins) + ": addr.source must name a Load");
        if (src.pred >= 0)
          fail(ErrCode::ConfigError,
               instr_ref(ins) + ": predicated loads cannot feed addresses");
        const ArrayDecl& sarr = kernel.arrays[static_cast<size_t>(src.addr.array)];
        if (sarr.contents.kind == ArrayContents::Kind::None)
          fail(ErrCode::OutOfBoundsAddress,
               instr_ref(ins) + ": index array '" + sarr.name + "' has no declared contents");
      }
    }
    for (InstrId in : ins.inputs) {
      InstrKind k = kernel.body[static_cast<size_t>(in)].kind;
      bool ok = false;
      switch (ins.kind) {
        case InstrKind::AddrCalc:
          ok = k == InstrKind::AddrCalc || k == InstrKind::Load;
          break;
        case InstrKind::Compute:
          ok = k == InstrKind::AddrCalc || k == InstrKind::Load || k == InstrKind::Compute;
          break;
        case InstrKind::Store:
          ok = k == InstrKind::Load || k == InstrKind::Compute;
          break;
        default:
          ok = false;
      }
      if (!ok)
        fail(ErrCode::ConfigError,
             instr_ref(ins) + ": illegal input kind '" +
                 instr_kind_name(kernel.body[static_cast<size_t>(in)].kind) + "'");
    }
  }

  ValidatedKernel vk;
  vk.spec_ = std::move(kernel);
  vk.pos_.resize(vk.spec_.body.size());
  for (size_t p = 0; p < vk.spec_.body.size(); ++p) vk.pos_[p] = static_cast<int32_t>(p);

  // Bounds: affine ranges are monotone in i, so endpoints suffice; indirect
  // indices are bounded through the source array's value range. On failure we
  // scan for a witness iteration so the message names instruction and i.
  const int64_t n = vk.spec_.iteration_count;
  for (const Instr& ins : vk.spec_.body) {
    if (!ins.is_memory()) continue;
    const ArrayDecl& arr = vk.spec_.arrays[static_cast<size_t>(ins.addr.array)];
    if (ins.addr.byte_offset < 0 || ins.addr.byte_offset >= arr.elem_size)
      fail(ErrCode::OutOfBoundsAddress, instr_ref(ins) + ": byte offset outside element");
    ValueRange x;
    if (ins.addr.source == kNoInstr) {
      x = {0, n - 1};
    } else {
      const Instr& src = vk.spec_.body[static_cast<size_t>(ins.addr.source)];
      x = contents_range(vk.spec_.arrays[static_cast<size_t>(src.addr.array)]);
    }
    int64_t e0 = ins.addr.scale * x.lo + ins.addr.offset;
    int64_t e1 = ins.addr.scale * x.hi + ins.addr.offset;
    int64_t lo = std::min(e0, e1);
    int64_t hi = std::max(e0, e1);
    if (lo < 0 || hi >= arr.length) {
      int64_t witness = -1;
      for (int64_t i = 0; i < n && witness < 0; ++i) {
        int64_t idx = vk.element_index(ins.addr, i);
        if (idx < 0 || idx >= arr.length) witness = i;
      }
      fail(ErrCode::OutOfBoundsAddress,
           instr_ref(ins) + ": address out of bounds for array '" + arr.name +
               "' at iteration " + std::to_string(witness));
    }
  }
  return vk;
}

std::vector<InstrId> backward_address_slice(const ValidatedKernel& kernel) {
  const auto& body = kernel.body();
  std::vector<char> in_slice(body.size(), 0);
  // Seed with the direct dependencies of every load address, then close over
  // calc inputs and indirection sources.
  std::vector<InstrId> work;
  auto add = [&](InstrId id) {
    if (id == kNoInstr || in_slice[static_cast<size_t>(id)]) return;
    in_slice[static_cast<size_t>(id)] = 1;
    work.push_back(id);
  };
  for (const Instr& ins : body) {
    if (ins.kind != InstrKind::Load) continue;
    add(ins.addr.calc);
    add(ins.addr.source);
  }
  while (!work.empty()) {
    const Instr& ins = body[static_cast<size_t>(work.back())];
    work.pop_back();
    for (InstrId in : ins.inputs) add(in);
    if (ins.is_memory()) {
      add(ins.addr.calc);
      add(ins.addr.source);
    }
  }
  std::vector<InstrId> out;
  for (size_t p = 0; p < body.size(); ++p)
    if (in_slice[p]) out.push_back(static_cast<InstrId>(p));
  return out;
}

std::vector<TraceEntry> trace_addresses(const ValidatedKernel& kernel, int64_t begin, int64_t end) {
  if (begin < 0 || end > kernel.iterations() || begin > end)
    fail(ErrCode::RangeOutOfBounds,
         "trace range [" + std::to_string(begin) + ", " + std::to_string(end) +
             ") outside [0, " + std::to_string(kernel.iterations()) + ")");
  std::vector<TraceEntry> out;
  for (int64_t i = begin; i < end; ++i) {
    for (const Instr& ins : kernel.body()) {
      if (!ins.is_memory() || !kernel.predicate_taken(ins, i)) continue;
      AccessKind k = ins.kind == InstrKind::Load    ? AccessKind::Load
                     : ins.kind == InstrKind::Store ? AccessKind::Store
                                                    : AccessKind::Prefetch;
      out.push_back({i, kernel.byte_address(ins.addr, i), k, ins.id});
    }
  }
  return out;
}

}  // namespace dae
