#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace icasim::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer: bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

/// Hash chaining: fold v into h. Order-sensitive.
inline constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64((h + kGolden) ^ (v + 0x2545f4914f6cdd1dULL));
}

/// FNV-1a over the bytes of s, then mixed. Used for scenario keys.
inline std::uint64_t hash_string(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

/// Counter-based random stream: value i is a pure function of (key, i).
/// Random access, no state, identical output for any evaluation order.
struct Stream {
    std::uint64_t key = 0;

    std::uint64_t bits(std::uint64_t i) const noexcept {
        // SplitMix64 sequence anchored at `key`.
        return mix64(key + (i + 1) * kGolden);
    }

    /// Uniform on (0, 1], 53-bit resolution.
    double u01(std::uint64_t i) const noexcept {
        return static_cast<double>((bits(i) >> 11) + 1) * 0x1p-53;
    }

    /// Equiprobable +1 / -1.
    double pm1(std::uint64_t i) const noexcept {
        return (bits(i) >> 63) ? -1.0 : 1.0;
    }

    /// Standard normal via Box-Muller on counter pairs; random access.
    double gaussian(std::uint64_t i) const noexcept {
        const std::uint64_t pair = i >> 1;
        const double u1 = u01(2 * pair);
        const double u2 = u01(2 * pair + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return (i & 1) ? r * std::sin(a) : r * std::cos(a);
    }
};

/// Derive a named substream, e.g. one per (seed, purpose, row).
inline Stream substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t sub = 0) noexcept {
    return Stream{combine(combine(seed, tag), sub)};
}

}  // namespace icasim::rng
