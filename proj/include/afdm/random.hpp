// random.hpp - deterministic seed derivation
//
// Per-trial seeds come from mixing (base_seed, stream, index) through
// SplitMix64, so parallel trials never share a generator and results do
// not depend on scheduling.

#pragma once

#include <cstdint>

namespace afdm {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// seed = splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index)
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

}  // namespace afdm
