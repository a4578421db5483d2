#pragma once

#include <cstdint>

namespace epsim {

// splitmix64 step; decorrelates derived streams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Order-independent per-record seed: records generated from (seed, index)
// are identical no matter how many siblings exist or in which order they
// are drawn.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 1));
}

} // namespace epsim
