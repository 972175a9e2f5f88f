#pragma once

#include <cstdint>
#include <random>

namespace apkit {

// splitmix64 step: advances the state and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mix a base seed with up to three stream tags into an engine seed. Every
// randomized trial in the benchmarks derives its own engine this way, so
// results are independent of loop order and identical across reruns.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t state = base;
    std::uint64_t out = splitmix64(state);
    state ^= a;
    out ^= splitmix64(state);
    state ^= b;
    out ^= splitmix64(state);
    state ^= c;
    out ^= splitmix64(state);
    return out;
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace apkit
