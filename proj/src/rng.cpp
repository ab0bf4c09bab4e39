#include "redunsense/rng.hpp"

#include <random>

namespace redunsense::rng {

double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::mt19937_64 engine(derive_key(seed, stream, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t seed, Stream stream,
                            std::uint64_t index) {
  std::mt19937_64 engine(derive_key(seed, stream, index));
  std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
  return dist(engine);
}

}  // namespace redunsense::rng
