#pragma once

#include <cstdint>

// splitmix64 (Vigna, public domain). Counter-friendly: independent streams are
// derived by mixing a seed with an index, so partitioned runs reproduce the
// sequential result bit for bit.

namespace schemelab {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound). Modulo bias is negligible for the small bounds used here.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
};

/// Stream seed for sub-stream `index` of `seed` (worker seeds, per-trial streams).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ull + index * 0x9e3779b97f4a7c15ull));
    return g.next();
}

} // namespace schemelab
