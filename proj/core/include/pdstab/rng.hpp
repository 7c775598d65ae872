#pragma once

#include <cmath>
#include <cstdint>

namespace pdstab {

// splitmix64 finalizer; bijective with strong avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based uniform in (0, 1]: a pure function of the key triple, so
// streams can be evaluated in any order, on any thread, with identical bits.
inline double uniform_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t salt) {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ stream);
    k = mix64(k ^ counter);
    k = mix64(k ^ salt);
    return static_cast<double>((k >> 11) + 1) * 0x1.0p-53;
}

// Standard normal draw keyed by (seed, stream, counter) via Box-Muller.
inline double gaussian_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = uniform_draw(seed, stream, counter, 0x243F6A8885A308D3ULL);
    const double u2 = uniform_draw(seed, stream, counter, 0x13198A2E03707344ULL);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace pdstab
