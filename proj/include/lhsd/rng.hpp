#pragma once

#include <cstdint>
#include <random>

namespace lhsd {

using rng_engine = std::mt19937_64;

// SplitMix64 step; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child seed for stream `index` of a master seed. Replications,
// strikes and path blocks each get their own stream so results do not depend
// on scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

inline rng_engine make_engine(std::uint64_t seed) { return rng_engine(seed); }

// Uniform on [0,1) with 53 random bits; avoids distribution-object
// implementation differences so streams are bit-reproducible.
inline double uniform01(rng_engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace lhsd
