#pragma once

#include <cstdint>
#include <random>

namespace hmmar {

using Engine = std::mt19937_64;

/// Seeds for the two independent random streams of one simulation.
///
/// A master seed is expanded with splitmix64: the first output seeds the
/// hidden-chain stream, the second seeds the innovation stream. Changing how
/// many noise draws are consumed therefore never perturbs the state path.
struct StreamSeeds {
  std::uint64_t chain;
  std::uint64_t noise;
};

std::uint64_t splitmix64(std::uint64_t& state);

StreamSeeds split_streams(std::uint64_t seed);

}  // namespace hmmar
