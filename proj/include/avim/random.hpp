#pragma once

// Seed derivation and portable sampling helpers.
//
// std::mt19937_64 is bit-specified by the standard; the distributions in
// <random> are not, so uniform draws are made here directly from the engine
// output to keep runs reproducible across standard libraries.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace avim {

using rng_engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Combine a base seed with a sequence of stream coordinates.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(base);
    for (auto p: path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ull));
    return s;
}

// Stable 64-bit FNV-1a, for turning names into stream coordinates.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c: s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(rng_engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), unbiased (rejection on the tail).
inline std::uint64_t uniform_index(rng_engine& rng, std::uint64_t n) {
    const std::uint64_t limit = rng_engine::max() - rng_engine::max() % n;
    std::uint64_t r;
    do { r = rng(); } while (r >= limit);
    return r % n;
}

// Standard normal deviate (Box-Muller, one of the pair).
inline double standard_normal(rng_engine& rng) {
    const double u1 = 1.0 - uniform01(rng); // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Counter-based stream: the n-th draw of the splitmix64 sequence seeded with
// `key`, so any step can be sampled without carrying generator state.
inline double counter_uniform01(std::uint64_t key, std::uint64_t n) {
    return static_cast<double>(splitmix64(key + n * 0x9e3779b97f4a7c15ull) >> 11) * 0x1.0p-53;
}

} // namespace avim
