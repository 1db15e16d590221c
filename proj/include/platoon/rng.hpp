#pragma once

#include <cstdint>
#include <random>

namespace platoon {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Documented stream-splitting rule: substream `index` of a master seed is
/// mix64(master + (index + 1) * golden-ratio increment). Monte Carlo run r
/// uses derive_seed(master, r); within a run, vehicle i draws losses from
/// substream 2i and measurement noise from substream 2i + 1.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// Uniform double in [0, 1) from the raw 64-bit output. Distributions are
/// hand-rolled so sequences do not depend on the standard library's
/// std::*_distribution implementations.
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace platoon
