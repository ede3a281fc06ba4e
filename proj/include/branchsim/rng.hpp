#pragma once

// 64-bit-seeded deterministic generator (splitmix64) with a fixed substream
// convention. Substream i of a generator in state s is seeded with
// mix(s ^ GOLDEN * (i + 1)); parallel draws keyed by draw index therefore
// produce the same results for any worker count.

#include <cmath>
#include <cstdint>

namespace branchsim {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (cosine branch).
    double next_normal() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    SplitMix64 substream(std::uint64_t index) const {
        return SplitMix64(mix(state_ ^ (kGolden * (index + 1))));
    }

    // Seed value the substream convention assigns to (seed, index).
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        return mix(seed ^ (kGolden * (index + 1)));
    }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace branchsim
