#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spinquench/fft.hpp"
#include "spinquench/field.hpp"
#include "spinquench/model.hpp"

namespace spinq::dynamics {

enum class RampShape { LinearQ, LinearB };

// Piecewise q(t): ramp from q_initial to q_final over ramp_duration, then
// constant hold. LinearB interpolates the static-field contribution linearly
// in B (so quadratically in t) above the microwave offset q_mu.
struct QuenchProtocol {
  double q_initial_hhz = 0.0;
  double q_final_hhz = 0.0;
  double ramp_ms = 0.0;
  double hold_ms = 0.0;
  RampShape shape = RampShape::LinearQ;
  double q_mu_hhz = 0.0; // LinearB only

  double duration_ms() const { return ramp_ms + hold_ms; }
  double q_at(double t_ms) const;
};

struct TermFlags {
  bool kinetic = true;
  bool trap = true;
  bool quadratic_zeeman = true;
  bool c0_density = true;
  bool c2_spin = true;
};

struct EvolutionConfig {
  double dt_ms = 0.0;
  std::vector<double> record_ms; // sorted ascending
  TermFlags terms;
  bool frozen_density = false; // c0 acts on the initial density map
  // analysis region for the recorded G0 (centered box); 0 = whole grid
  double g0_region_x_um = 0.0;
  double g0_region_z_um = 0.0;
  bool store_snapshots = false;
  int nan_check_interval = 64; // steps
};

struct TrajectoryRecord {
  std::vector<double> times_ms;
  std::vector<std::array<double, 3>> populations; // (N+, N0, N-)
  std::vector<double> g0;                         // G(0) over the region
  std::vector<field::SpinField> snapshots;        // if store_snapshots
};

// Signals a NaN/Inf during time evolution (CLI maps it to exit code 3).
struct NumericalAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SnapshotCallback =
    std::function<void(double t_ms, const field::SpinField&)>;

// Symmetric split-step spectral integrator for the spin-1 mean-field
// equations: half-step kinetic in k-space, full local step (trap + q Fz^2 +
// c0 n + c2 spin) via exact exponentiation of the frozen local 3x3 Hermitian,
// half-step kinetic. Unitary by construction.
class Stepper {
 public:
  Stepper(const field::Grid2D& grid, const model::Couplings& cpl,
          const model::Trap& trap);

  // One Strang step at quadratic Zeeman shift q_now (use q at midpoint).
  void step(field::SpinField& f, double dt_ms, double q_now_hhz,
            const TermFlags& terms);

  // Integrate q(t) over the protocol, recording at the requested times
  // (snapped to the step grid). Throws NumericalAbort on NaN/Inf.
  TrajectoryRecord evolve(field::SpinField& f, const QuenchProtocol& protocol,
                          const EvolutionConfig& cfg,
                          const SnapshotCallback& on_snapshot = nullptr);

  // Total energy in h*Hz: kinetic + trap + Zeeman + interactions.
  double total_energy(const field::SpinField& f, double q_hhz,
                      const TermFlags& terms) const;

  // Documented step-size bound: 0.1 * min(hbar/eps_kmax, hbar/q0).
  double dt_bound_ms() const;

  const model::Couplings& couplings() const { return cpl_; }

  // Frozen-density mode support: capture the density map c0 acts on.
  void freeze_density(const field::SpinField& f);

 private:
  field::Grid2D grid_;
  model::Couplings cpl_;
  model::Trap trap_;
  fft::Fft2d fft_;
  std::vector<double> eps_hhz_;       // eps_k per FFT bin
  std::vector<double> potential_hhz_; // V(r) per point
  std::vector<double> frozen_n_;      // frozen-density map (optional)
  std::vector<std::complex<double>> kin_half_phase_;
  double cached_dt_ms_ = -1.0;
  bool cached_kinetic_on_ = true;

  void refresh_kinetic_phases(double dt_ms, bool kinetic_on);
  void local_step(field::SpinField& f, double dt_ms, double q_hhz,
                  const TermFlags& terms);
};

} // namespace spinq::dynamics
