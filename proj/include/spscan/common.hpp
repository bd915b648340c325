#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spscan {

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw error(what); }

// splitmix64, used to derive independent stream seeds from (seed, key) pairs
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t hash_str(std::string_view s) {
    // FNV-1a; stable across platforms, used only for rng stream derivation
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Deterministic per-record generator: same (seed, key) always yields the
// same stream regardless of processing order or thread count.
inline std::mt19937_64 fork_rng(uint64_t seed, std::string_view key) {
    return std::mt19937_64(mix64(seed ^ mix64(hash_str(key))));
}

inline std::mt19937_64 fork_rng(uint64_t seed, uint64_t key) {
    return std::mt19937_64(mix64(seed ^ mix64(key)));
}

// Inclusive-bounds uniform draw that does not depend on libstdc++'s
// distribution internals, so streams are reproducible by construction.
inline uint64_t draw_u64(std::mt19937_64& rng, uint64_t lo, uint64_t hi) {
    if (lo > hi) fail("draw_u64: empty range");
    uint64_t span = hi - lo + 1;
    if (span == 0) return rng();  // full range
    // rejection sampling to avoid modulo bias
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return lo + v % span;
}

inline double draw_unit(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;  // [0,1) with 53 random bits
}

inline double draw_normal(std::mt19937_64& rng) {
    // Box-Muller on explicit uniform draws; std::normal_distribution is
    // implementation-defined and would break cross-platform reproducibility
    double u1 = 0.0;
    while (u1 == 0.0) u1 = draw_unit(rng);
    double u2 = draw_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace spscan
