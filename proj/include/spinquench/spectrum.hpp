#pragma once

#include <vector>

namespace spinq::spectrum {

// Bogoliubov spectrum of transverse spin excitations above the paramagnetic
// state: E_s^2(k) = (eps_k + q)(eps_k + q - q0), eps_k = hbar^2 k^2 / 2m.
// Unstable modes (E_s^2 < 0) grow in power at rate 1/tau = 2 sqrt(|E_s^2|)/hbar.
//
// Units: k in 1/um, energies in h*Hz, rates in 1/s. `kinetic_coeff` converts
// k^2 -> eps_k/h (see constants::kinetic_coeff_um2_hz).

enum class QuenchClass { Stable, Shallow, Deep };

struct SpectrumPoint {
  double k_um_inv = 0.0;
  double epsilon_hhz = 0.0;
  double es_squared_hhz2 = 0.0;
  double growth_rate_per_s = 0.0; // power growth rate, 0 if stable
  double tau_s = 0.0;             // 1/rate, +inf if stable
};

double epsilon_hhz(double k_um_inv, double kinetic_coeff);

double dispersion_sq(double k_um_inv, double q_hhz, double q0_hhz,
                     double kinetic_coeff);

double growth_rate_per_s(double k_um_inv, double q_hhz, double q0_hhz,
                         double kinetic_coeff);

// Stable: q >= q0.  Shallow: q0/2 <= q < q0.  Deep: q < q0/2.
QuenchClass classify(double q_hhz, double q0_hhz);

// Wavevector of the fastest-growing mode. Analytic: eps_k* = q0/2 - q for a
// deep quench, k* = 0 for a shallow one. Throws if q >= q0 (no unstable mode).
double dominant_wavevector(double q_hhz, double q0_hhz, double kinetic_coeff);

// pi / k*, defined for deep quenches only (k* > 0); throws otherwise.
double predicted_domain_size_um(double q_hhz, double q0_hhz,
                                double kinetic_coeff);

// Uniformly sampled spectrum on [0, k_max], n_k >= 2.
std::vector<SpectrumPoint> spectrum_table(double q_hhz, double q0_hhz,
                                          double kinetic_coeff, double k_max,
                                          int n_k);

} // namespace spinq::spectrum
