#pragma once

#include <cmath>
#include <stdexcept>

#include "spinquench/constants.hpp"
#include "spinquench/params.hpp"

namespace spinq::model {

// Effective 2D mean-field couplings in internal units (h*Hz, um, ms).
// The spin coupling is calibrated so that 2 |c2| n_ref = q0 at the reference
// column density: uniform runs at n_ref then reproduce the analytic spectrum
// exactly. c0/c2 = 3 abar / delta_a carries over from the contact couplings.
struct Couplings {
  double c0_hhz_um2 = 0.0; // density interaction, > 0 for repulsive
  double c2_hhz_um2 = 0.0; // spin interaction, < 0 for ferromagnetic
  double kinetic_coeff = 0.0; // eps_k/h = coeff * k^2 [Hz um^2]
  double q0_hhz = 0.0;        // 2 |c2| n_ref
  double n_ref_um2 = 0.0;     // reference (peak) column density

  static Couplings from_params(const params::PhysicalParams& p,
                               const params::DerivedScales& d) {
    if (!(d.effective_2d_density_um2 > 0.0))
      throw std::invalid_argument("Couplings: 2D reference density must be > 0");
    if (p.delta_a_m == 0.0)
      throw std::invalid_argument("Couplings: delta_a == 0 is degenerate");
    Couplings c;
    c.n_ref_um2 = d.effective_2d_density_um2;
    c.q0_hhz = d.q0_hhz;
    c.c2_hhz_um2 = -0.5 * d.q0_hhz / c.n_ref_um2;
    c.c0_hhz_um2 = c.c2_hhz_um2 * 3.0 * p.abar_m / p.delta_a_m;
    c.kinetic_coeff = d.kinetic_coeff_um2_hz;
    return c;
  }
};

// 2D harmonic trap, V/h in Hz at position (x, z) in um.
struct Trap {
  bool enabled = false;
  double beta_x_hz_um2 = 0.0; // m omega_x^2 / 2h, scaled to um
  double beta_z_hz_um2 = 0.0;

  static Trap harmonic(double mass_kg, double omega_x_rad_s,
                       double omega_z_rad_s) {
    Trap t;
    t.enabled = true;
    const double s = 1.0e-12 / (2.0 * constants::h_si); // (m/um)^2 / 2h
    t.beta_x_hz_um2 = mass_kg * omega_x_rad_s * omega_x_rad_s * s;
    t.beta_z_hz_um2 = mass_kg * omega_z_rad_s * omega_z_rad_s * s;
    return t;
  }

  double potential_hhz(double x_um, double z_um) const {
    if (!enabled) return 0.0;
    return beta_x_hz_um2 * x_um * x_um + beta_z_hz_um2 * z_um * z_um;
  }
};

} // namespace spinq::model
