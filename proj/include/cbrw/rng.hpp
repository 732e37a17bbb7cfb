#pragma once

#include <cstdint>

namespace cbrw {

// splitmix64 output scrambler.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return mix64(state_ += 0x9E3779B97F4A7C15ULL); }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Independent stream for trial k of a run seeded with `seed`. A pure function of
// (seed, k), so estimates do not depend on how trials are partitioned across
// threads.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t k) {
    return SplitMix64(mix64(seed ^ mix64(k ^ 0xD1B54A32D192ED03ULL)));
}

}  // namespace cbrw
