#pragma once

#include <cstdint>

namespace redunsense::rng {

// Every random quantity in the library is a pure function of
// (seed, stream, index): a fresh engine is keyed per draw, so results do not
// depend on call order or on how work is split across threads.

enum class Stream : std::uint64_t {
  mismatch = 1,
  measurement = 2,
  sampling = 3,
  bootstrap = 4,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

/// Standard normal deviate for (seed, stream, index).
double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index);

/// Uniform integer in [0, bound) for (seed, stream, index). bound must be > 0.
std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t seed, Stream stream,
                            std::uint64_t index);

}  // namespace redunsense::rng
