#pragma once

#include <string>

#include "dae/kernel_ir.hpp"

namespace dae {

// Text format for kernel definition files, one kernel per file:
//
//   kernel fig3
//   iterations 100
//   invocations 1
//
//   [predicates]
//   hot 0.5
//
//   [arrays]
//   a f64 128
//   idx i64 100 = perm(37,5)
//   tiny i64 3 = {3,1,2}
//
//   [body]
//   0: calc cost=1
//   1: load a[i+1] calc=0
//   2: compute cost=2 in=1 pred=hot
//   3: store c[i] val=2
//
// Element types: i8/i16/i32/i64/f32/f64 or a raw byte size like b24.
// Index expressions: i, i+3, 2*i-1, 7, @4, 2*@4+1 (@id = value of load id).
KernelSpec parse_kernel_text(const std::string& text, const std::string& origin = "<string>");
KernelSpec load_kernel_file(const std::string& path);

std::string kernel_to_text(const KernelSpec& kernel);
void save_kernel_file(const KernelSpec& kernel, const std::string& path);

}  // namespace dae
