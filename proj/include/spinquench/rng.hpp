#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace spinq::rng {

// Philox-4x32-10 counter-based generator (Salmon et al., SC 2011).
// Pure function of (key, counter): reproducible, order-independent, and
// trivially parallel. Noise draws are keyed by the physical mode they seed,
// so refining the grid preserves the realization on shared modes.

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

// Stream discriminators for independent noise purposes under one seed.
enum class Stream : uint32_t {
  VacuumPlus = 0,
  VacuumMinus = 1,
  ThermalPlus = 2,
  ThermalMinus = 3,
  Scratch = 4,
};

// Uniform in (0, 1), 64-bit resolution.
double uniform(uint64_t seed, uint64_t mode_id, Stream stream,
               uint32_t block = 0);

// Standard complex normal: Re and Im each N(0, 1/2), so <|z|^2> = 1.
std::complex<double> complex_gaussian(uint64_t seed, uint64_t mode_id,
                                      Stream stream, uint32_t block = 0);

// Pack signed FFT frequency indices into a grid-refinement-stable mode id.
inline uint64_t mode_id(int fx_signed, int fz_signed) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(fx_signed)) << 32) |
         static_cast<uint64_t>(static_cast<uint32_t>(fz_signed));
}

} // namespace spinq::rng
