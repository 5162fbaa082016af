// SPDX-License-Identifier: Apache-2.0
#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so every draw that feeds a reproducible artifact goes through the
// conversions below on top of std::mt19937_64.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace clp::rng {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a sequence of stream tags.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

inline double uniform(Engine& e, double lo, double hi) { return lo + (hi - lo) * uniform01(e); }

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_index(Engine& e, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = e();
    while (x >= limit) x = e();
    return x % bound;
}

/// Standard normal via Box-Muller (one value per call).
inline double normal(Engine& e) {
    double u1 = uniform01(e);
    while (u1 <= 0.0) u1 = uniform01(e);
    const double u2 = uniform01(e);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool bernoulli(Engine& e, double p) { return p > 0.0 && uniform01(e) < p; }

/// Fisher-Yates over any random-access range.
template <typename Range>
void shuffle(Range& r, Engine& e) {
    const auto n = static_cast<std::uint64_t>(std::size(r));
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = uniform_index(e, i);
        using std::swap;
        swap(r[i - 1], r[j]);
    }
}

} // namespace clp::rng
