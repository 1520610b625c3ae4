#pragma once

#include <cstdint>

#include "smock/geometry.hpp"

namespace smock {

// Counter-based deterministic sampling: sample i of stream (seed) is a pure
// function of (seed, i), so results do not depend on evaluation order or
// parallel scheduling.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index,
                                  std::uint64_t lane = 0) {
    return splitmix64(splitmix64(seed ^ 0x243f6a8885a308d3ULL) + index * 0x100000001b3ULL + lane);
}

// Uniform double in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
    return static_cast<double>(counter_hash(seed, index, lane) >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t lane,
                      double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, index, lane);
}

inline Vec2 uniform_in_box(std::uint64_t seed, std::uint64_t index, const AxisBox& box,
                           std::uint64_t lane = 0) {
    return {uniform(seed, index, 2 * lane, box.min.x, box.max.x),
            uniform(seed, index, 2 * lane + 1, box.min.y, box.max.y)};
}

}  // namespace smock
