#pragma once

#include <cstdint>

namespace qumin {

/// SplitMix64: tiny splittable PRNG with platform-independent output, so a
/// fixed seed reproduces every measurement collapse bit-for-bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    SplitMix64 split() { return SplitMix64(next()); }

    void reseed(std::uint64_t seed) { state_ = seed; }

private:
    std::uint64_t state_;
};

}  // namespace qumin
