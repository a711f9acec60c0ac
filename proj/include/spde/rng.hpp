#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (key, counter), so any element of a noise stream can be
// regenerated independently of thread count and iteration order.

#include <array>
#include <cstdint>
#include <utility>

namespace spde::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32(Counter ctr, Key key) noexcept;

/// Uniform in (0, 1) from the top 52 bits of two 32-bit words; never 0 or 1.
double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept;

/// Two independent standard normals for stream (seed, a, b, c), Box-Muller.
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint32_t a, std::uint32_t b,
                                      std::uint32_t c) noexcept;

} // namespace spde::rng
