#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bwex {

using Engine = std::mt19937_64;

/// Engine for stream `index` of a run seeded with `master_seed`. The pair is
/// pushed through std::seed_seq, so streams with distinct indices start from
/// decorrelated states and do not depend on the order they are created in.
[[nodiscard]] inline Engine make_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x6277'6578U};
    return Engine(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
[[nodiscard]] inline double uniform01(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Exp(1) variate by inversion.
[[nodiscard]] inline double exponential1(Engine& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace bwex
