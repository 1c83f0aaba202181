#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace paircover {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for (seed, stream): batch item `stream` can be generated
/// in any order, or in parallel, without changing its output.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51ed270b0a1c2ef3ULL)));
}

/// Uniform double in [0, 1) from the top 53 engine bits.
inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool rand_coin(std::mt19937_64& rng) {
    return (rng() >> 63) != 0;
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

} // namespace paircover
