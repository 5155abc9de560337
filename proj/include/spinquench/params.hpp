#pragma once

#include <array>
#include <string>
#include <vector>

namespace spinq::params {

// Atomic constants and experiment configuration in SI units. Everything the
// rest of the code needs is derived from these once, up front.
struct PhysicalParams {
  double atomic_mass_kg = 0.0;
  double delta_a_m = 0.0;       // a2 - a0, signed; negative for ferromagnetic 87Rb
  double abar_m = 0.0;          // spin-independent scattering length (a0 + 2 a2)/3
  double peak_density_3d_m3 = 0.0;
  double column_density_2d_peak_m2 = 0.0;
  double atom_number = 0.0;
  double magnetic_moment_j_per_t = 0.0; // g_F mu_B
  std::array<double, 3> trap_omega_rad_s{0.0, 0.0, 0.0}; // (x, y, z)
};

struct ZeemanConfig {
  double static_field_gauss = 0.0;
  double rabi_frequency_rad_s = 0.0;
  double microwave_detuning_rad_s = 0.0;
  double static_coefficient_hz_per_g2 = 70.0;
};

enum class DensityConvention { PeakColumn, MeanColumn, UserSupplied };

struct DerivedScales {
  double c2_si = 0.0;              // J m^3, signed
  double q0_hhz = 0.0;             // critical quadratic Zeeman shift, magnitude, h*Hz
  double spin_healing_length_um = 0.0; // +inf if delta_a == 0
  double tau_max_ms = 0.0;         // hbar/q0; +inf if q0 == 0
  double effective_2d_density_um2 = 0.0;
  double kinetic_coeff_um2_hz = 0.0; // epsilon_k/h = coeff * k_um^2
  bool degenerate_noninteracting = false; // delta_a == 0 case
};

// Hard-error validation plus soft warnings (e.g. delta_a >= 0).
std::vector<std::string> validate(const PhysicalParams& p);

// q_B/h = coeff * B^2, result in h*Hz. B in gauss.
double q_static_hhz(double b_gauss, double coeff_hz_per_g2 = 70.0);

// q_mu = -hbar Omega^2 / (4 delta), result in h*Hz. Inputs in rad/s.
// Throws std::domain_error on zero detuning (unless rabi == 0).
double q_microwave_hhz(double rabi_rad_s, double detuning_rad_s);

// Combined quadratic Zeeman shift q = q_B + q_mu of a field configuration.
double total_q_hhz(const ZeemanConfig& z);

// Derive every downstream energy/length scale. q0 is stored as a positive
// magnitude (2 |c2| n_eff) so that q > q0 is the stable side.
// For DensityConvention::UserSupplied the caller provides q0/h directly in
// `user_q0_hz` and the density conventions are bypassed.
DerivedScales derive_scales(const PhysicalParams& p, DensityConvention conv,
                            double user_q0_hz = 0.0);

} // namespace spinq::params
