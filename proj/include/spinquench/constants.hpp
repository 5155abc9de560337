#pragma once

// Physical constants (CODATA 2018) and the internal unit system.
//
// Internal units used throughout the simulation:
//   energy  : h * Hz   ("hHz"; an energy E is stored as E/h in Hz)
//   length  : micrometers
//   time    : milliseconds
// All conversion factors are derived from the constants below; nothing is
// hard-coded downstream.

namespace spinq::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double h_si = 6.62607015e-34; // J s, exact
inline constexpr double hbar_si = h_si / (2.0 * pi);
inline constexpr double amu_si = 1.66053906660e-27;         // kg
inline constexpr double bohr_radius_si = 5.29177210903e-11; // m
inline constexpr double bohr_magneton_si = 9.2740100783e-24; // J/T

// 87Rb atomic mass, 86.909180527 u
inline constexpr double rb87_mass_si = 86.909180527 * amu_si;

// |g_F| = 1/2 for the F=1 manifold of 87Rb
inline constexpr double rb87_gf_mu_b_si = 0.5 * bohr_magneton_si;

// Phase accumulated per unit (h*Hz energy) x (ms time), in radians:
// exp(-i E t / hbar) = exp(-i * 2*pi*1e-3 * E[hHz] * t[ms])
inline constexpr double rad_per_hhz_ms = 2.0 * pi * 1.0e-3;

// epsilon_k/h = kinetic_coeff(m) * k^2 with k in 1/um, result in Hz.
inline constexpr double kinetic_coeff_um2_hz(double mass_kg) {
  return hbar_si * 1.0e12 / (4.0 * pi * mass_kg);
}

} // namespace spinq::constants
