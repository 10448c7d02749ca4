#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dae/support.hpp"

namespace dae {

using InstrId = int32_t;
inline constexpr InstrId kNoInstr = -1;

enum class InstrKind { AddrCalc, Load, Store, Compute, Prefetch };

const char* instr_kind_name(InstrKind k);

// Optional synthetic contents of an array. Index arrays must declare contents
// so that indirect addresses can be evaluated; data arrays usually carry none.
struct ArrayContents {
  enum class Kind { None, Sequential, AffinePerm, Explicit };
  Kind kind = Kind::None;
  // AffinePerm: value(i) = (mul * i + add) mod length. With mul coprime to the
  // length this is a permutation, which is how the presets build irregular
  // access patterns without any RNG.
  int64_t mul = 1;
  int64_t add = 0;
  std::vector<int64_t> values;  // Explicit
};

struct ArrayDecl {
  std::string name;
  int32_t elem_size = 8;
  int64_t length = 0;
  uint64_t base = 0;  // byte address; 0 = assign automatically during validation
  ArrayContents contents;
};

// Element address: array.base + elem_size * (scale * x + offset) + byte_offset
// where x is the loop index, or the value of a prior Load when source is set.
struct AddressExpr {
  int32_t array = -1;
  InstrId source = kNoInstr;  // kNoInstr -> affine in the loop index
  int64_t scale = 1;
  int64_t offset = 0;
  int32_t byte_offset = 0;       // struct member offset inside the element
  InstrId calc = kNoInstr;       // AddrCalc instruction modelling this computation
};

struct PredicateDecl {
  std::string name;
  double probability = 1.0;
};

struct Instr {
  InstrId id = kNoInstr;
  InstrKind kind = InstrKind::Compute;
  std::vector<InstrId> inputs;  // AddrCalc: calcs/loads; Compute: any producers; Store: value producers
  int32_t cost_ops = 1;         // AddrCalc / Compute only
  AddressExpr addr;             // Load / Store / Prefetch only
  int32_t pred = -1;            // index into KernelSpec::predicates, -1 = always

  bool is_memory() const {
    return kind == InstrKind::Load || kind == InstrKind::Store || kind == InstrKind::Prefetch;
  }
};

struct KernelSpec {
  std::string name;
  int64_t iteration_count = 0;
  int64_t invocations = 1;  // outer repetitions of the whole loop
  std::vector<ArrayDecl> arrays;
  std::vector<PredicateDecl> predicates;
  std::vector<Instr> body;
};

enum class AccessKind { Load, Store, Prefetch };

const char* access_kind_name(AccessKind k);

struct TraceEntry {
  int64_t iteration;
  uint64_t address;
  AccessKind kind;
  InstrId instr;
};

// A KernelSpec that passed validate_kernel(). Array bases are assigned,
// instruction ids are mapped to topological (body) positions, and all
// address expressions are known to stay in bounds for every iteration.
class ValidatedKernel {
 public:
  const KernelSpec& spec() const { return spec_; }
  const std::vector<Instr>& body() const { return spec_.body; }
  int64_t iterations() const { return spec_.iteration_count; }
  int64_t invocations() const { return spec_.invocations; }
  const std::string& name() const { return spec_.name; }

  int32_t position_of(InstrId id) const;
  const Instr& instr_by_id(InstrId id) const;

  // True when the instruction executes in the given iteration.
  bool predicate_taken(const Instr& ins, int64_t iteration) const;

  // Value loaded by an index Load in the given iteration (follows chains).
  int64_t load_value(InstrId load_id, int64_t iteration) const;

  // Element index / resolved byte address of a memory instruction.
  int64_t element_index(const AddressExpr& a, int64_t iteration) const;
  uint64_t byte_address(const AddressExpr& a, int64_t iteration) const;

  // Dynamic op count over all iterations (cost_ops for calc/compute, 1 for
  // memory ops), honouring predicates.
  int64_t dynamic_ops() const;

 private:
  friend ValidatedKernel validate_kernel(KernelSpec kernel, bool allow_prefetch);
  KernelSpec spec_;
  std::vector<int32_t> pos_;  // body position by id (ids are densified at validation)
};

// Checks every KernelSpec invariant and returns the validated wrapper.
// allow_prefetch is used by the transform when re-validating derived phases.
ValidatedKernel validate_kernel(KernelSpec kernel, bool allow_prefetch = false);

// Minimal id set whose evaluation reproduces every load address: AddrCalcs
// feeding load addresses plus loads whose values feed addresses, transitively.
std::vector<InstrId> backward_address_slice(const ValidatedKernel& kernel);

// Deterministic address stream for iterations [begin, end).
std::vector<TraceEntry> trace_addresses(const ValidatedKernel& kernel, int64_t begin, int64_t end);

int64_t array_value(const ArrayDecl& array, int64_t index);

}  // namespace dae
