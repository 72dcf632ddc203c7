#ifndef ERDY_RNG_HPP
#define ERDY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace erdy::rng {

// Counter-based generation built on SplitMix64. Every consumer owns a
// stream keyed by (seed, purpose tag, indices), so draw order across
// consumers is irrelevant and parallel generation stays deterministic.

/// murmur3 fmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDull;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ull;
    z ^= z >> 33;
    return z;
}

/// Absorb one 64-bit value into a key.
inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h + 0x9E3779B97F4A7C15ull + v);
}

// Purpose tags keeping the derived streams of one user seed disjoint.
inline constexpr std::uint64_t tag_edge  = 0x45444745ull; // pair sampling
inline constexpr std::uint64_t tag_init  = 0x494E4954ull; // initial-state assignment
inline constexpr std::uint64_t tag_sim   = 0x53494D00ull; // event loop
inline constexpr std::uint64_t tag_r2    = 0x52320000ull; // sampled pair statistic
inline constexpr std::uint64_t tag_study = 0x53545544ull; // per-row seed derivation

/// SplitMix64 stream.
struct stream {
    std::uint64_t state = 0;

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1), safe as a log argument.
    double next_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0. Fixed-point multiply, no rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }
};

inline stream keyed_stream(std::uint64_t seed, std::uint64_t tag,
                           std::uint64_t a = 0, std::uint64_t b = 0) {
    return stream{combine(combine(combine(seed, tag), a), b)};
}

/// Stream owning the draws of the unordered pair (i, j), i < j.
inline stream pair_stream(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    return keyed_stream(seed, tag_edge, i, j);
}

/// Exponential waiting time with the given rate.
inline double exponential(stream& s, double rate) {
    return -std::log(s.next_open()) / rate;
}

/// Standard normal via Box-Muller (one draw per call).
inline double normal(stream& s) {
    const double u1 = s.next_open();
    const double u2 = s.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fisher-Yates shuffle driven by the stream.
template <class T>
void shuffle(stream& s, std::span<T> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(s.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace erdy::rng

#endif
