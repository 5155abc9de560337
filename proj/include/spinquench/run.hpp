#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinquench/analysis.hpp"
#include "spinquench/dynamics.hpp"
#include "spinquench/io.hpp"
#include "spinquench/model.hpp"
#include "spinquench/params.hpp"
#include "spinquench/seed.hpp"

namespace spinq::run {

inline constexpr const char* kVersion = "0.1.0";

// Fully validated experiment description assembled from an INI config.
struct SimConfig {
  params::PhysicalParams phys;
  params::DensityConvention convention = params::DensityConvention::UserSupplied;
  double user_q0_hz = 15.0;
  params::DerivedScales scales;
  model::Couplings couplings;
  model::Trap trap;
  bool trap_enabled = false;
  field::Grid2D grid;
  seed::GroundStateSpec ground;
  seed::SeedSpec seed_spec;
  dynamics::QuenchProtocol protocol;
  dynamics::EvolutionConfig evo;

  // [analysis]
  double region_x_um = 16.0;
  double region_z_um = 124.0;
  analysis::DomainAxis domain_axis = analysis::DomainAxis::LongZ;
  double noise_subtraction = 0.0;
  double t_m_ms = 77.0;
  double fit_window_ms = 90.0;

  // [sweep]
  std::vector<double> sweep_qf_hhz;
  int sweep_repetitions = 1;
  double sweep_measure_t_ms = 87.0;

  std::string config_snapshot; // canonical INI text
};

// Built-in presets: "paper" (trapped Thomas-Fermi cloud, paper parameters)
// and "quick" (small uniform box for smoke runs).
std::string preset_config(const std::string& name);

SimConfig load_config(const io::Ini& ini);

struct TrajectoryResult {
  uint64_t rng_seed = 0;
  bool ok = false;
  std::string error;
  dynamics::TrajectoryRecord record;
  std::vector<std::string> outputs; // files written, relative to out_dir
};

// Ground state -> seed -> evolve. If out_dir is nonempty, map dumps are
// written at every record time plus a populations CSV.
TrajectoryResult run_trajectory(const SimConfig& cfg, uint64_t rng_seed,
                                const std::string& out_dir,
                                const std::string& tag);

struct SweepCell {
  double qf_hhz = 0.0;
  int requested = 0;
  int completed = 0;
  double g0_mean = 0.0;
  double g0_se = 0.0;
  double ld_mean_um = 0.0;
  double ld_se_um = 0.0;
  int ld_count = 0; // runs where a domain size was measurable
  std::string status = "ok";
};

// Ensemble sweep over q_f values; trajectories run on a worker pool but
// results aggregate in input order. Per-cell failures are recorded and the
// sweep continues.
std::vector<SweepCell> run_sweep(const SimConfig& cfg, uint64_t base_seed,
                                 int jobs);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepCell>& cells);

struct ManifestEntry {
  int index = 0;
  uint64_t rng_seed = 0;
  std::string status;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const std::string& command,
                    const SimConfig& cfg, uint64_t base_seed, int jobs,
                    const std::vector<ManifestEntry>& entries,
                    double wall_seconds);

} // namespace spinq::run
