#include "dae/transform.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace dae {

namespace {

std::string index_str(const KernelSpec& k, const AddressExpr& a) {
  std::string var = a.source == kNoInstr ? "i" : "v" + std::to_string(a.source);
  std::string s;
  if (a.scale == 0) return std::to_string(a.offset);
  if (a.scale != 1) s += std::to_string(a.scale) + "*";
  s += var;
  if (a.offset > 0) s += "+" + std::to_string(a.offset);
  if (a.offset < 0) s += std::to_string(a.offset);
  return k.arrays[static_cast<size_t>(a.array)].name + "[" + s + "]";
}

void dump_body(std::ostringstream& out, const KernelSpec& k, const std::string& pad) {
  for (const Instr& ins : k.body) {
    out << pad;
    switch (ins.kind) {
      case InstrKind::AddrCalc:
        out << "v" << ins.id << " = addr_calc(";
        for (size_t t = 0; t < ins.inputs.size(); ++t) out << (t ? ", " : "") << "v" << ins.inputs[t];
        out << ") ops=" << ins.cost_ops;
        break;
      case InstrKind::Load:
        out << "v" << ins.id << " = load " << index_str(k, ins.addr);
        break;
      case InstrKind::Prefetch:
        out << "prefetch " << index_str(k, ins.addr);
        break;
      case InstrKind::Store:
        out << "store " << index_str(k, ins.addr) << " = ";
        for (size_t t = 0; t < ins.inputs.size(); ++t) out << (t ? ", " : "") << "v" << ins.inputs[t];
        break;
      case InstrKind::Compute:
        out << "v" << ins.id << " = compute(";
        for (size_t t = 0; t < ins.inputs.size(); ++t) out << (t ? ", " : "") << "v" << ins.inputs[t];
        out << ") ops=" << ins.cost_ops;
        break;
    }
    if (ins.pred >= 0) out << " if " << k.predicates[static_cast<size_t>(ins.pred)].name;
    out << "\n";
  }
}

void dump_phase(std::ostringstream& out, const std::string& fn, const KernelSpec& k,
                int64_t granularity, int64_t slices) {
  out << fn << " {\n";
  out << "  offset = 0\n";
  out << "  for (j = 0; j < " << slices << "; j++) {\n";
  out << "    for (k = 0; k < min(" << granularity << ", N - offset); k++) {\n";
  out << "      i = offset + k\n";
  dump_body(out, k, "      ");
  out << "    }\n";
  out << "    offset += " << granularity << "\n";
  out << "  }\n";
  out << "}\n";
}

}  // namespace

ChunkedKernel chunk(const ValidatedKernel& kernel, int64_t granularity) {
  const int64_t n = kernel.iterations();
  if (granularity < 1 || granularity > n)
    fail(ErrCode::GranularityOutOfRange,
         "granularity " + std::to_string(granularity) + " outside [1, " + std::to_string(n) + "]");
  ChunkedKernel ck;
  ck.base = kernel;
  ck.granularity = granularity;
  ck.slice_count = (n + granularity - 1) / granularity;
  return ck;
}

PhasePair make_phase_pair(const ChunkedKernel& chunked) {
  const KernelSpec& base = chunked.base.spec();
  auto slice = backward_address_slice(chunked.base);
  std::unordered_set<InstrId> in_slice(slice.begin(), slice.end());

  KernelSpec access;
  access.name = base.name + "_access";
  access.iteration_count = base.iteration_count;
  access.invocations = base.invocations;
  access.arrays = base.arrays;
  for (const Instr& ins : base.body) {
    if (in_slice.count(ins.id)) {
      // Address slice survives as-is: calcs stay calcs, indirection loads stay
      // blocking loads. Predicates are stripped; the access phase always runs
      // the full address stream.
      Instr copy = ins;
      copy.pred = -1;
      access.body.push_back(std::move(copy));
    } else if (ins.kind == InstrKind::Load) {
      // Terminal loads become non-blocking prefetch hints at the same position.
      Instr pf;
      pf.id = ins.id;
      pf.kind = InstrKind::Prefetch;
      pf.addr = ins.addr;
      pf.pred = -1;
      access.body.push_back(std::move(pf));
    }
    // Stores and computes never enter the access phase.
  }

  PhasePair pair;
  pair.chunked = chunked;
  pair.granularity = chunked.granularity;
  pair.degenerate = access.body.empty();
  pair.access = validate_kernel(std::move(access), /*allow_prefetch=*/true);
  return pair;
}

double instruction_overhead(const PhasePair& pair) {
  int64_t base_ops = pair.execute().dynamic_ops();
  int64_t access_ops = pair.access.dynamic_ops();
  return static_cast<double>(access_ops + base_ops) / static_cast<double>(base_ops);
}

std::string dump_phases(const PhasePair& pair) {
  std::ostringstream out;
  const KernelSpec& exec = pair.execute().spec();
  out << "// kernel " << exec.name << ", N=" << exec.iteration_count << ", granularity="
      << pair.granularity << ", slices=" << pair.chunked.slice_count;
  if (pair.degenerate) out << ", degenerate: no memory-bound work";
  out << "\n";
  dump_phase(out, "access()  // LITTLE", pair.access.spec(), pair.granularity,
             pair.chunked.slice_count);
  dump_phase(out, "execute() // big", exec, pair.granularity, pair.chunked.slice_count);
  return out.str();
}

}  // namespace dae
