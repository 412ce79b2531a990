#pragma once

#include "cayley/cylinder.hpp"

#include <cstdint>

namespace cayley {

/// SplitMix64: tiny, portable and reproducible across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do x = next();
        while (x >= limit);
        return x % bound;
    }
    bool coin() { return next() & 1U; }

private:
    std::uint64_t state_;
};

struct RandomCylinderOptions {
    Depth max_depth = 2;
    unsigned max_rectangles = 3;
    unsigned max_constraints = 3;
    /// Spin values drawn from [0, spin_range) over the naturals.
    Spin spin_range = 6;
};

Rectangle random_rectangle(const CylinderField& field, SplitMix64& rng, const RandomCylinderOptions& opt = {});
CylinderSet random_cylinder(const CylinderField& field, SplitMix64& rng, const RandomCylinderOptions& opt = {});

} // namespace cayley
