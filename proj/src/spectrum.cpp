#include "spinquench/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinquench/constants.hpp"

namespace spinq::spectrum {

namespace c = spinq::constants;

double epsilon_hhz(double k_um_inv, double kinetic_coeff) {
  return kinetic_coeff * k_um_inv * k_um_inv;
}

double dispersion_sq(double k_um_inv, double q_hhz, double q0_hhz,
                     double kinetic_coeff) {
  if (!(q0_hhz > 0.0)) throw std::invalid_argument("dispersion_sq: q0 must be > 0");
  if (k_um_inv < 0.0) throw std::invalid_argument("dispersion_sq: k must be >= 0");
  const double x = epsilon_hhz(k_um_inv, kinetic_coeff) + q_hhz;
  return x * (x - q0_hhz);
}

double growth_rate_per_s(double k_um_inv, double q_hhz, double q0_hhz,
                         double kinetic_coeff) {
  const double es2 = dispersion_sq(k_um_inv, q_hhz, q0_hhz, kinetic_coeff);
  if (es2 >= 0.0) return 0.0;
  // 2 sqrt(|E_s^2|)/hbar with |E_s| in h*Hz -> 4 pi sqrt(|es2|) in 1/s
  return 4.0 * c::pi * std::sqrt(-es2);
}

QuenchClass classify(double q_hhz, double q0_hhz) {
  if (!(q0_hhz > 0.0)) throw std::invalid_argument("classify: q0 must be > 0");
  if (q_hhz >= q0_hhz) return QuenchClass::Stable;
  if (q_hhz >= 0.5 * q0_hhz) return QuenchClass::Shallow;
  return QuenchClass::Deep;
}

double dominant_wavevector(double q_hhz, double q0_hhz, double kinetic_coeff) {
  const QuenchClass qc = classify(q_hhz, q0_hhz);
  if (qc == QuenchClass::Stable)
    throw std::domain_error("dominant_wavevector: no unstable mode for q >= q0");
  if (qc == QuenchClass::Shallow) return 0.0;
  const double eps_star = 0.5 * q0_hhz - q_hhz;
  return std::sqrt(eps_star / kinetic_coeff);
}

double predicted_domain_size_um(double q_hhz, double q0_hhz,
                                double kinetic_coeff) {
  if (classify(q_hhz, q0_hhz) != QuenchClass::Deep)
    throw std::domain_error("predicted_domain_size: defined for deep quenches only");
  return c::pi / dominant_wavevector(q_hhz, q0_hhz, kinetic_coeff);
}

std::vector<SpectrumPoint> spectrum_table(double q_hhz, double q0_hhz,
                                          double kinetic_coeff, double k_max,
                                          int n_k) {
  if (n_k < 2) throw std::invalid_argument("spectrum_table: n_k must be >= 2");
  if (!(k_max > 0.0)) throw std::invalid_argument("spectrum_table: k_max must be > 0");
  std::vector<SpectrumPoint> table(static_cast<size_t>(n_k));
  for (int i = 0; i < n_k; ++i) {
    const double k = k_max * static_cast<double>(i) / (n_k - 1);
    SpectrumPoint& p = table[static_cast<size_t>(i)];
    p.k_um_inv = k;
    p.epsilon_hhz = epsilon_hhz(k, kinetic_coeff);
    p.es_squared_hhz2 = dispersion_sq(k, q_hhz, q0_hhz, kinetic_coeff);
    p.growth_rate_per_s = growth_rate_per_s(k, q_hhz, q0_hhz, kinetic_coeff);
    p.tau_s = p.growth_rate_per_s > 0.0
                  ? 1.0 / p.growth_rate_per_s
                  : std::numeric_limits<double>::infinity();
  }
  return table;
}

} // namespace spinq::spectrum
