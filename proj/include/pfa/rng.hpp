#pragma once

#include "pfa/normal.hpp"

#include <cmath>
#include <cstdint>

namespace pfa {

// splitmix64: small, fast, and statistically solid. One instance per logical
// stream; streams are derived statelessly from (seed, counter) so replicates
// and Monte-Carlo draws can be generated in any order with identical results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw via the inverse CDF.
    double normal() { return normal_quantile(uniform01()); }

    /// Standard Cauchy draw via the inverse CDF.
    double cauchy() {
        constexpr double pi = 3.14159265358979323846;
        return std::tan(pi * (uniform01() - 0.5));
    }

private:
    std::uint64_t state_;
};

/// Stateless stream derivation: mixes (seed, index) into a fresh seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline Rng rng_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_seed(seed, index));
}

}  // namespace pfa
