#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace bevcomm {

// Deterministic random number generation. Every stochastic quantity in the
// library (feature noise, scenario sampling, parameter init, pose errors)
// draws from this generator so that runs reproduce bit-for-bit on any
// platform, and so the sequence can be replicated from the documented
// constants alone.
//
// Core generator: 64-bit linear congruential generator
//   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
// Doubles take the top 53 bits of the advanced state.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Inclusive integer range [lo, hi] via rejection-free modulo on the top
    // bits; spans here are tiny relative to 2^64 so bias is negligible.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // One standard-normal pair via Box-Muller on two uniform draws.
    std::pair<double, double> next_gaussian_pair() {
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer; mixes a base seed with stream salts so that distinct
// subsystems (per agent, per purpose) get decorrelated LCG streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt_a, std::uint64_t salt_b = 0) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt_a + 1) + 0xBF58476D1CE4E5B9ULL * (salt_b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace bevcomm
