#include "spde/rng.hpp"

#include <cmath>

namespace spde::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) noexcept {
  const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

} // namespace

Counter philox4x32(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  // 52 bits plus a half-ulp offset: (2b + 1) / 2^53 is exact, so the extremes stay off 0 and 1.
  const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 12;
  return (double(bits) + 0.5) * 0x1.0p-52;
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint32_t a, std::uint32_t b,
                                      std::uint32_t c) noexcept {
  const Counter out = philox4x32({a, b, c, 0u}, {std::uint32_t(seed), std::uint32_t(seed >> 32)});
  const double u1 = to_open_unit(out[0], out[1]);
  const double u2 = to_open_unit(out[2], out[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

} // namespace spde::rng
