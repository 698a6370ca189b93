// Small shared helpers: power-of-two checks, grid construction, constants,
// and the process-wide thread budget.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace photon_reader {

inline constexpr double kLn2 = std::numbers::ln2;

// Worker-thread cap: PHOTON_READER_THREADS if set to a positive integer,
// otherwise (or when set to 0) the hardware concurrency. Results never depend
// on this value — it only controls how work is partitioned.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("PHOTON_READER_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0')
    throw std::runtime_error("PHOTON_READER_THREADS must be a non-negative integer");
  if (v == 0) return hw;
  return static_cast<unsigned>(std::min<unsigned long>(v, 256));
}

inline constexpr bool is_power_of_two(std::uint64_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

// Exact log2 for powers of two (exponent extraction, no FP round-trip).
inline unsigned log2_exact(std::uint64_t n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("log2_exact: not a power of two");
  unsigned e = 0;
  while (n > 1) { n >>= 1; ++e; }
  return e;
}

// n logarithmically spaced points on [lo, hi], endpoints exact.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_spaced: need 0 < lo <= hi");
  if (n == 0) throw std::invalid_argument("log_spaced: need at least one point");
  std::vector<double> out(n);
  if (n == 1) { out[0] = lo; return out; }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

// n linearly spaced points on [lo, hi], endpoints exact.
inline std::vector<double> lin_spaced(double lo, double hi, std::size_t n) {
  if (!(hi >= lo)) throw std::invalid_argument("lin_spaced: need lo <= hi");
  if (n == 0) throw std::invalid_argument("lin_spaced: need at least one point");
  std::vector<double> out(n);
  if (n == 1) { out[0] = lo; return out; }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace photon_reader
