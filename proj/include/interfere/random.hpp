#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace interfere {

/// Deterministic pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Its seed is derived from a (seed, stream label) pair through
/// SplitMix64, so independent consumers (weight init, sample ordering, mask
/// scatter) can share one user seed without sharing a sequence. Real and
/// index draws are computed from raw engine output rather than through
/// std::*_distribution, whose algorithms are implementation-defined.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64+splitmix64";

    Rng(std::uint64_t seed, std::string_view stream);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform on {0, ..., n-1}; n must be positive.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace interfere
