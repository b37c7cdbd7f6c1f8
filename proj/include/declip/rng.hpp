#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace declip::rng {

// Counter-based generator: value(seed, counter) = splitmix64 finalizer applied
// to seed + (counter + 1) * golden ratio. Every draw is addressed by an
// explicit 64-bit counter, so any entry of a random matrix can be reproduced
// in isolation (and in any language that has 64-bit integer arithmetic).
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + kGolden * (counter + 1));
}

// FNV-1a 64-bit over raw bytes.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

// Derives an independent counter stream for a named purpose ("image-proj",
// "shuffle", ...) so different consumers of one user seed never collide.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view tag) {
    return mix64(seed ^ fnv1a64(tag));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform_pos(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal draw addressed by `index`. Box-Muller on two counter draws;
// the sine partner is discarded so entries stay independently addressable.
inline double gaussian(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform_pos(at(seed, 2 * index));
    const double u2 = uniform01(at(seed, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double uniform_range(std::uint64_t seed, std::uint64_t index, double lo, double hi) {
    return lo + (hi - lo) * uniform01(at(seed, index));
}

// Deterministic Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<std::size_t> permutation(std::uint64_t seed, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::uint64_t counter = 0;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(at(seed, counter++) % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace declip::rng
