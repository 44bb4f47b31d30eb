#pragma once

#include <cstdint>

namespace fractile {

// Counter-based uniform generator (splitmix64 finalizer). Every draw is a
// pure function of (seed, counter), so sample streams can be sharded by index
// with no shared state.
struct CounterRng {
    std::uint64_t seed = 0x5EED;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits.
    double uniform(std::uint64_t counter) const {
        return double(mix(seed * 0x2545F4914F6CDD1Dull + counter) >> 11) * 0x1.0p-53;
    }
};

}  // namespace fractile
