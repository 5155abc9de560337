#pragma once

#include <cstdint>
#include <optional>

#include "spinquench/field.hpp"
#include "spinquench/model.hpp"

namespace spinq::seed {

enum class SeedMode { None, Vacuum, Thermal, SingleMode };
enum class SeedBasis { Bare, Bogoliubov };

struct SeedSpec {
  SeedMode mode = SeedMode::Vacuum;
  uint64_t rng_seed = 0;
  double thermal_population = 0.0; // N_pm, atoms per sideband
  double k_single_um_inv = 0.0;    // SingleMode: target wavevector along z
  double amp_single = 0.0;         // SingleMode: atoms per component in the mode
  double pair_phase_rad = 0.0;     // SingleMode: relative phase of the -k partner
  double scale = 1.0;              // variance multiplier on the vacuum seed
  SeedBasis basis = SeedBasis::Bare;
  // Bogoliubov basis only: quadratic Zeeman shift at seeding time.
  double q_at_seed_hhz = 0.0;
};

struct BogoliubovMode {
  double k_um_inv = 0.0;
  double u = 1.0;
  double v = 0.0;
};

// u, v diagonalizing the quadratic spin Hamiltonian at wavevector k,
// u^2 - v^2 = 1. Defined for stable modes (E_s^2 > 0) only; throws otherwise.
BogoliubovMode bogoliubov_uv(double k_um_inv, double q_hhz, double q0_hhz,
                             double kinetic_coeff);

// Pair phase of the growing quadrature of an unstable amplifier pair
// (psi_+ at +k, psi_- at -k): seeding with this SeedSpec::pair_phase_rad
// puts the whole amplitude on the growing eigenvector, giving a pure
// exponential from t = 0. Throws for stable modes.
double growing_pair_phase(double k_um_inv, double q_hhz, double q0_hhz,
                          double kinetic_coeff);

enum class GroundStateKind { Uniform, ThomasFermi, ImaginaryTime };

struct GroundStateSpec {
  GroundStateKind kind = GroundStateKind::Uniform;
  double atom_number = 0.0;        // trapped kinds: total N
  double uniform_density_um2 = 0.0; // Uniform kind: column density
  // imaginary-time controls
  double dtau_ms = 0.01;
  double energy_tol = 1.0e-10; // relative energy change per step
  int max_iters = 200000;
};

// All atoms in psi_0. Uniform: constant sqrt(n). ThomasFermi: 2D TF profile
// n = (mu - V)/c0 normalized to N. ImaginaryTime: relaxation of the scalar
// problem; throws std::runtime_error on non-convergence.
field::SpinField ground_state(const field::Grid2D& grid,
                              const model::Couplings& cpl,
                              const model::Trap& trap,
                              const GroundStateSpec& spec);

// Adds mode-wise noise to psi_+ and psi_- (psi_0 untouched).
// Vacuum: complex Gaussian, 1/2 quantum per plane-wave mode per component
// (times spec.scale), truncated-Wigner convention.
// Thermal: fixed-modulus random-phase noise totaling thermal_population atoms
// per sideband. SingleMode: deterministic pair (+k in psi_+, -k in psi_-).
void apply_seed(field::SpinField& f, const SeedSpec& spec,
                const model::Couplings& cpl);

} // namespace spinq::seed
