#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dae {

// Global simulated time is kept in integer femtoseconds so that cores with
// different clock periods can interleave without floating-point drift.
using TimeFs = int64_t;

inline constexpr TimeFs kFsPerNs = 1'000'000;

constexpr TimeFs fs_from_ns(int64_t ns) { return ns * kFsPerNs; }
constexpr double ns_from_fs(TimeFs fs) { return static_cast<double>(fs) / kFsPerNs; }

// Clock period of a core in fs. 2000 MHz -> 500000 fs, 1400 MHz -> 714285 fs.
constexpr TimeFs period_fs_from_mhz(int32_t mhz) { return 1'000'000'000LL / mhz; }

// First cycle whose start is at or after t.
constexpr int64_t cycle_at_or_after(TimeFs t, TimeFs period) {
  return (t + period - 1) / period;
}

// First cycle whose start is strictly after t (used for lock handoffs).
constexpr int64_t cycle_after(TimeFs t, TimeFs period) { return t / period + 1; }

// Busy cycles a grid-aligned core spends on a service of the given latency.
// Matches the cycle_at_or_after alignment rule exactly, which plain
// ns*mhz/1000 arithmetic does not once the integer fs period rounds.
constexpr int64_t grid_cycles_for_ns(int64_t ns, int32_t mhz) {
  TimeFs period = period_fs_from_mhz(mhz);
  return (fs_from_ns(ns) + period - 1) / period;
}

// Error taxonomy shared by validation, configuration and the CLI.
enum class ErrCode {
  UseBeforeDef,
  UnknownArray,
  OutOfBoundsAddress,
  RangeOutOfBounds,
  GranularityOutOfRange,
  ConfigError,
  ParseError,
  UnknownRegion,
  DivisionByZero,
  OracleTooLarge,
};

class Error : public std::runtime_error {
 public:
  Error(ErrCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrCode code() const { return code_; }

 private:
  ErrCode code_;
};

[[noreturn]] inline void fail(ErrCode code, const std::string& what) { throw Error(code, what); }

// splitmix64: tiny, fully deterministic generator. We avoid <random>
// distributions so that jitter streams are reproducible bit-for-bit.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Box-Muller; one draw per call, the paired value is discarded to keep the
  // stream position a simple function of the number of calls.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace dae
