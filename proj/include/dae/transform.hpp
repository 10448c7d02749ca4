#pragma once

#include <string>

#include "dae/kernel_ir.hpp"

namespace dae {

// The loop split into slices of `granularity` iterations; the last slice is
// short when granularity does not divide the trip count.
struct ChunkedKernel {
  ValidatedKernel base;
  int64_t granularity = 0;
  int64_t slice_count = 0;

  int64_t slice_begin(int64_t s) const { return s * granularity; }
  int64_t slice_end(int64_t s) const {
    int64_t e = (s + 1) * granularity;
    return e < base.iterations() ? e : base.iterations();
  }
};

ChunkedKernel chunk(const ValidatedKernel& kernel, int64_t granularity);

// Access phase (address slice + prefetch conversions) paired with the
// untouched Execute phase (== chunked base body).
struct PhasePair {
  ChunkedKernel chunked;
  ValidatedKernel access;
  int64_t granularity = 0;
  bool degenerate = false;  // no memory-bound work: access body is empty

  const ValidatedKernel& execute() const { return chunked.base; }
};

PhasePair make_phase_pair(const ChunkedKernel& chunked);

// (dynamic ops of access + execute) / dynamic ops of base, >= 1.0.
double instruction_overhead(const PhasePair& pair);

// Human-readable pseudocode dump of both phases, used by golden tests.
std::string dump_phases(const PhasePair& pair);

}  // namespace dae
