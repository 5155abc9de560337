#include "spinquench/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinquench/constants.hpp"

namespace spinq::params {

namespace c = spinq::constants;

std::vector<std::string> validate(const PhysicalParams& p) {
  if (!(p.atomic_mass_kg > 0.0))
    throw std::invalid_argument("params: atomic_mass must be > 0");
  if (!(p.peak_density_3d_m3 > 0.0))
    throw std::invalid_argument("params: peak_density_3d must be > 0");
  if (!(p.atom_number > 0.0))
    throw std::invalid_argument("params: atom_number must be > 0");

  std::vector<std::string> warnings;
  if (p.delta_a_m >= 0.0)
    warnings.push_back("params: delta_a >= 0, interactions are not ferromagnetic");
  return warnings;
}

double q_static_hhz(double b_gauss, double coeff_hz_per_g2) {
  if (b_gauss < 0.0)
    throw std::invalid_argument("q_static: B must be >= 0");
  return coeff_hz_per_g2 * b_gauss * b_gauss;
}

double q_microwave_hhz(double rabi_rad_s, double detuning_rad_s) {
  if (rabi_rad_s == 0.0) return 0.0;
  if (detuning_rad_s == 0.0)
    throw std::domain_error("q_microwave: detuning must be nonzero");
  // -hbar Omega^2 / (4 delta), divided by h to express in h*Hz
  return -(c::hbar_si / c::h_si) * rabi_rad_s * rabi_rad_s / (4.0 * detuning_rad_s);
}

double total_q_hhz(const ZeemanConfig& z) {
  return q_static_hhz(z.static_field_gauss, z.static_coefficient_hz_per_g2) +
         q_microwave_hhz(z.rabi_frequency_rad_s, z.microwave_detuning_rad_s);
}

DerivedScales derive_scales(const PhysicalParams& p, DensityConvention conv,
                            double user_q0_hz) {
  validate(p);

  DerivedScales d;
  d.c2_si = 4.0 * c::pi * c::hbar_si * c::hbar_si * p.delta_a_m /
            (3.0 * p.atomic_mass_kg);
  d.kinetic_coeff_um2_hz = c::kinetic_coeff_um2_hz(p.atomic_mass_kg);
  d.effective_2d_density_um2 = p.column_density_2d_peak_m2 * 1.0e-12;

  double n_eff_m3 = p.peak_density_3d_m3;
  switch (conv) {
    case DensityConvention::PeakColumn:
      break;
    case DensityConvention::MeanColumn:
      // column average of a Thomas-Fermi parabola: <n> = (4/5) n_peak
      n_eff_m3 *= 0.8;
      break;
    case DensityConvention::UserSupplied:
      break;
  }

  if (conv == DensityConvention::UserSupplied) {
    if (!(user_q0_hz >= 0.0))
      throw std::invalid_argument("derive_scales: user q0 must be >= 0");
    d.q0_hhz = user_q0_hz;
  } else {
    d.q0_hhz = 2.0 * std::abs(d.c2_si) * n_eff_m3 / c::h_si;
  }

  if (p.delta_a_m == 0.0) {
    d.degenerate_noninteracting = true;
    d.spin_healing_length_um = std::numeric_limits<double>::infinity();
  } else {
    d.spin_healing_length_um =
        1.0e6 / std::sqrt(8.0 * c::pi * n_eff_m3 * std::abs(p.delta_a_m));
  }

  d.tau_max_ms = d.q0_hhz > 0.0
                     ? 1.0e3 * c::hbar_si / (c::h_si * d.q0_hhz)
                     : std::numeric_limits<double>::infinity();
  return d;
}

} // namespace spinq::params
