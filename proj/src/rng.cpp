#include "spinquench/rng.hpp"

#include <cmath>

#include "spinquench/constants.hpp"

namespace spinq::rng {

namespace {

constexpr uint32_t kW32A = 0x9E3779B9u;
constexpr uint32_t kW32B = 0xBB67AE85u;
constexpr uint32_t kM4x32A = 0xD2511F53u;
constexpr uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  lo = static_cast<uint32_t>(p);
  hi = static_cast<uint32_t>(p >> 32);
}

inline void round_once(std::array<uint32_t, 4>& ctr,
                       const std::array<uint32_t, 2>& key) {
  uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kM4x32A, ctr[0], lo0, hi0);
  mul_hi_lo(kM4x32B, ctr[2], lo1, hi1);
  const std::array<uint32_t, 4> out = {hi1 ^ ctr[1] ^ key[0], lo1,
                                       hi0 ^ ctr[3] ^ key[1], lo0};
  ctr = out;
}

} // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> ctr = counter;
  std::array<uint32_t, 2> k = key;
  for (int i = 0; i < 10; ++i) {
    round_once(ctr, k);
    k[0] += kW32A;
    k[1] += kW32B;
  }
  return ctr;
}

namespace {

std::array<uint32_t, 4> block_for(uint64_t seed, uint64_t mode, Stream stream,
                                  uint32_t block) {
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  const std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(mode), static_cast<uint32_t>(mode >> 32),
      static_cast<uint32_t>(stream), block};
  return philox4x32(ctr, key);
}

inline double to_unit_interval(uint32_t hi, uint32_t lo) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  // (bits + 0.5) / 2^64, strictly inside (0, 1)
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-64;
}

} // namespace

double uniform(uint64_t seed, uint64_t mode, Stream stream, uint32_t block) {
  const auto r = block_for(seed, mode, stream, block);
  return to_unit_interval(r[0], r[1]);
}

std::complex<double> complex_gaussian(uint64_t seed, uint64_t mode,
                                      Stream stream, uint32_t block) {
  const auto r = block_for(seed, mode, stream, block);
  const double u1 = to_unit_interval(r[0], r[1]);
  const double u2 = to_unit_interval(r[2], r[3]);
  // Box-Muller; each quadrature has variance 1/2
  const double amp = std::sqrt(-std::log(u1));
  const double phase = 2.0 * constants::pi * u2;
  return {amp * std::cos(phase), amp * std::sin(phase)};
}

} // namespace spinq::rng
