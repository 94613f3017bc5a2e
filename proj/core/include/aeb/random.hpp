#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so everything that must be reproducible across toolchains draws
// through these instead.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace aeb {

using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound)
{
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    std::uint64_t v = rng();
    while (v < limit) {
        v = rng();
    }
    return v % bound;
}

/// Standard normal via Box-Muller (one draw per call, second value discarded).
inline double standard_normal(Rng& rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace aeb
