#pragma once

#include <cstdint>
#include <random>

namespace kicktop {

// SplitMix64 finalizer; used to derive decorrelated seeds for sub-streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// Independent generator for sample `stream` of a run seeded with `seed`.
// The same (seed, stream) pair always yields the same sequence, so
// samples can be drawn in any order or on any thread.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(stream + 1))),
                    static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(stream + 1)) >> 32)};
  return Rng(seq);
}

}  // namespace kicktop
