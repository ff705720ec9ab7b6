#pragma once

#include <cstdint>

#include "nkamg/sparse.hpp"

namespace nkamg {

/// 64-bit linear congruential generator:
///   state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)
///   u      = (state >> 11) * 2^-53          in [0, 1)
/// Seeding sets state = seed. Each draw advances the state once before reading it.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

/// n entries uniform in [-1, 1) from a fresh generator seeded with seed.
Vector random_vector(std::size_t n, std::uint64_t seed);

} // namespace nkamg
