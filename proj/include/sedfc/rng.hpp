#pragma once

#include <cstdint>

namespace sedfc {

// SplitMix64: splittable 64-bit generator (Steele et al., "Fast splittable
// pseudorandom number generators"). Chosen over std engines so that streams
// are bit-exact across platforms and substreams can be derived by index.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
        return mix(mix(seed) + (index + 1) * 0x9e3779b97f4a7c15ull);
    }

    // Independent stream for (seed, index); used one-per-trial.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(substream_seed(seed, index));
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0,1), 53-bit resolution
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double prob) { return next_double() < prob; }

    // uniform in [0, n); Lemire's unbiased multiply-shift rejection
    std::uint64_t next_below(std::uint64_t n) {
        using u128 = unsigned __int128;
        std::uint64_t x = next();
        u128 m = static_cast<u128>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next();
                m = static_cast<u128>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace sedfc
