#include "hmmar/rng.hpp"

namespace hmmar {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

StreamSeeds split_streams(std::uint64_t seed) {
  std::uint64_t state = seed;
  StreamSeeds out{};
  out.chain = splitmix64(state);
  out.noise = splitmix64(state);
  return out;
}

}  // namespace hmmar
