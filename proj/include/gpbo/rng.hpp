#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace gpbo {

/// Deterministic stream derivation: hashes a label or index into an existing
/// seed so that every consumer of randomness owns an independent stream.
/// All randomness in a run must flow from one master seed through these
/// splits; nothing may touch std::random_device.
namespace seed {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ (value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t combine(std::uint64_t seed, std::string_view label) {
    // FNV-1a over the label, then mixed into the seed.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return combine(seed, h);
}

} // namespace seed

/// Seeded generator with explicit, implementation-pinned draw routines.
/// uniform() and normal() are defined here (not via <random> distributions)
/// so that identical seeds give identical streams on any platform.
///
/// split() derives children from the construction seed, not the evolving
/// engine state, so split order is independent of draw order.
class Rng {
public:
    explicit Rng(std::uint64_t s) : seed_(s), gen_(s) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

    std::uint64_t construction_seed() const { return seed_; }

    /// Independent child stream tagged by label (and optional index).
    Rng split(std::string_view label) const {
        return Rng(seed::combine(seed_, label));
    }
    Rng split(std::string_view label, std::uint64_t index) const {
        return Rng(seed::combine(seed::combine(seed_, label), index));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace gpbo
