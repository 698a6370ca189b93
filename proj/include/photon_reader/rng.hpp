// Seedable, splittable randomness for Monte Carlo trials.
//
// Every trial gets its own generator derived from (master_seed, trial_index),
// so the draw sequence inside a trial is independent of how trials are
// scheduled across threads. All draws go through the helpers below, which use
// only bit-exact integer arithmetic on the standardized mt19937_64 output —
// no distribution objects whose algorithms vary between standard libraries.
#pragma once

#include <cstdint>
#include <random>

namespace photon_reader::rng {

// One splitmix64 step (Steele, Lea & Flood). Bijective 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the stream_index-th substream of master_seed. Two mixer rounds keep
// nearby (seed, index) pairs far apart in seed space.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  std::uint64_t s = master_seed;
  std::uint64_t z = splitmix64(s);
  s = z ^ (stream_index * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

inline std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return std::mt19937_64(substream_seed(master_seed, stream_index));
}

// Uniform double in [0, 1): top 53 bits of one generator word.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n): multiply-high reduction of one generator word.
// Bias is < n / 2^64, far below Monte Carlo resolution; the draw count per
// call is fixed at one, which keeps substreams aligned across code paths.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  using u128 = unsigned __int128;
  return static_cast<std::size_t>((static_cast<u128>(g()) * static_cast<u128>(n)) >> 64);
}

}  // namespace photon_reader::rng
