#include "spinquench/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "spinquench/constants.hpp"

namespace spinq::run {

namespace c = spinq::constants;
using io::ConfigError;
using nlohmann::json;

std::string preset_config(const std::string& name) {
  if (name == "paper") {
    return R"(# Deep quench of a trapped spin-1 condensate, paper-scale parameters.
[params]
mass_kg = 1.443160895e-25
delta_a_bohr = -1.4
abar_bohr = 100.87
n3d_cm3 = 2.6e14
n2d_eff_q0_hz = 15.0
n2d_peak_um2 = 555.0
atom_number = 2.0e6
trap_hz_x = 39
trap_hz_y = 440
trap_hz_z = 4.2
static_coeff_hz_per_g2 = 70
density_convention = user

[grid]
nx = 64
nz = 512
dx_um = 1.0
dz_um = 1.0

[seed]
mode = vacuum
rng_seed = 1
n_pm = 0
seed_scale = 1.0
basis = bare

[evolve]
ground_state = thomas_fermi
trap = true
dt_ms = 0.0125
ramp_ms = 5
hold_ms = 152
qi_hz = 40
qf_hz = 2
ramp_shape = linear_q
record_ms = 27,37,47,57,67,77,87,97,107,117,127,137,147,157
frozen_density = false

[analysis]
region_x_um = 16
region_z_um = 124
domain_axis = long_z
noise_subtraction = 0
t_m_ms = 77
fit_window_ms = 90

[sweep]
qf_hz = 0,2,4,6
repetitions = 5
measure_t_ms = 87
)";
  }
  if (name == "quick") {
    return R"(# Small uniform box for fast smoke runs.
[params]
mass_kg = 1.443160895e-25
delta_a_bohr = -1.4
abar_bohr = 100.87
n3d_cm3 = 2.6e14
n2d_eff_q0_hz = 15.0
n2d_peak_um2 = 555.0
atom_number = 2.0e6
static_coeff_hz_per_g2 = 70
density_convention = user

[grid]
nx = 16
nz = 128
dx_um = 1.0
dz_um = 1.0

[seed]
mode = vacuum
rng_seed = 1

[evolve]
ground_state = uniform
trap = false
dt_ms = 0.0125
ramp_ms = 5
hold_ms = 25
qi_hz = 40
qf_hz = 2
record_ms = 10,20,30

[analysis]
region_x_um = 0
region_z_um = 0

[sweep]
qf_hz = 2
repetitions = 1
measure_t_ms = 20
)";
  }
  throw ConfigError("unknown preset: " + name + " (available: paper, quick)");
}

SimConfig load_config(const io::Ini& ini) {
  ini.check_known_keys("params", {"mass_kg", "delta_a_bohr", "abar_bohr",
                                  "n3d_cm3", "n2d_eff_q0_hz", "n2d_peak_um2",
                                  "atom_number", "trap_hz_x", "trap_hz_y",
                                  "trap_hz_z", "static_coeff_hz_per_g2",
                                  "density_convention", "magnetic_moment_jt"});
  ini.check_known_keys("grid", {"nx", "nz", "dx_um", "dz_um"});
  ini.check_known_keys("seed", {"mode", "rng_seed", "n_pm", "k_single",
                                "amp_single", "seed_scale", "basis"});
  ini.check_known_keys(
      "evolve", {"ground_state", "trap", "dt_ms", "ramp_ms", "hold_ms", "qi_hz",
                 "qf_hz", "ramp_shape", "q_mu_hz", "record_ms",
                 "frozen_density", "kinetic", "quadratic_zeeman", "c0_density",
                 "c2_spin", "imag_time_dtau_ms", "imag_time_tol",
                 "imag_time_max_iters"});
  ini.check_known_keys("analysis",
                       {"region_x_um", "region_z_um", "domain_axis",
                        "noise_subtraction", "t_m_ms", "fit_window_ms"});
  ini.check_known_keys("sweep", {"qf_hz", "repetitions", "measure_t_ms"});

  SimConfig cfg;
  cfg.phys.atomic_mass_kg = ini.get_double("params", "mass_kg", c::rb87_mass_si);
  cfg.phys.delta_a_m =
      ini.get_double("params", "delta_a_bohr", -1.4) * c::bohr_radius_si;
  cfg.phys.abar_m =
      ini.get_double("params", "abar_bohr", 100.87) * c::bohr_radius_si;
  cfg.phys.peak_density_3d_m3 =
      ini.get_double("params", "n3d_cm3", 2.6e14) * 1.0e6;
  cfg.phys.column_density_2d_peak_m2 =
      ini.get_double("params", "n2d_peak_um2", 555.0) * 1.0e12;
  cfg.phys.atom_number = ini.get_double("params", "atom_number", 2.0e6);
  cfg.phys.magnetic_moment_j_per_t =
      ini.get_double("params", "magnetic_moment_jt", c::rb87_gf_mu_b_si);
  cfg.phys.trap_omega_rad_s = {
      2.0 * c::pi * ini.get_double("params", "trap_hz_x", 39.0),
      2.0 * c::pi * ini.get_double("params", "trap_hz_y", 440.0),
      2.0 * c::pi * ini.get_double("params", "trap_hz_z", 4.2)};

  const std::string conv = ini.get_or("params", "density_convention", "user");
  if (conv == "user") cfg.convention = params::DensityConvention::UserSupplied;
  else if (conv == "peak_column") cfg.convention = params::DensityConvention::PeakColumn;
  else if (conv == "mean_column") cfg.convention = params::DensityConvention::MeanColumn;
  else throw ConfigError("[params] density_convention: unknown value '" + conv + "'");
  cfg.user_q0_hz = ini.get_double("params", "n2d_eff_q0_hz", 15.0);

  try {
    cfg.scales = params::derive_scales(cfg.phys, cfg.convention, cfg.user_q0_hz);
    cfg.couplings = model::Couplings::from_params(cfg.phys, cfg.scales);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[params] invalid: ") + e.what());
  }

  try {
    cfg.grid = field::Grid2D(
        static_cast<int>(ini.get_int("grid", "nx", 64)),
        static_cast<int>(ini.get_int("grid", "nz", 512)),
        ini.get_double("grid", "dx_um", 1.0), ini.get_double("grid", "dz_um", 1.0));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[grid] invalid: ") + e.what());
  }

  cfg.trap_enabled = ini.get_bool("evolve", "trap", false);
  cfg.trap = cfg.trap_enabled
                 ? model::Trap::harmonic(cfg.phys.atomic_mass_kg,
                                         cfg.phys.trap_omega_rad_s[0],
                                         cfg.phys.trap_omega_rad_s[2])
                 : model::Trap{};

  const std::string gs = ini.get_or("evolve", "ground_state",
                                    cfg.trap_enabled ? "thomas_fermi" : "uniform");
  if (gs == "uniform") cfg.ground.kind = seed::GroundStateKind::Uniform;
  else if (gs == "thomas_fermi") cfg.ground.kind = seed::GroundStateKind::ThomasFermi;
  else if (gs == "imaginary_time") cfg.ground.kind = seed::GroundStateKind::ImaginaryTime;
  else throw ConfigError("[evolve] ground_state: unknown value '" + gs + "'");
  cfg.ground.atom_number = cfg.phys.atom_number;
  cfg.ground.uniform_density_um2 = cfg.couplings.n_ref_um2;
  cfg.ground.dtau_ms = ini.get_double("evolve", "imag_time_dtau_ms", 0.01);
  cfg.ground.energy_tol = ini.get_double("evolve", "imag_time_tol", 1e-10);
  cfg.ground.max_iters =
      static_cast<int>(ini.get_int("evolve", "imag_time_max_iters", 200000));

  const std::string mode = ini.get_or("seed", "mode", "vacuum");
  if (mode == "vacuum") cfg.seed_spec.mode = seed::SeedMode::Vacuum;
  else if (mode == "thermal") cfg.seed_spec.mode = seed::SeedMode::Thermal;
  else if (mode == "none") cfg.seed_spec.mode = seed::SeedMode::None;
  else if (mode == "single_mode") cfg.seed_spec.mode = seed::SeedMode::SingleMode;
  else throw ConfigError("[seed] mode: unknown value '" + mode + "'");
  cfg.seed_spec.rng_seed = ini.get_u64("seed", "rng_seed", 1);
  cfg.seed_spec.thermal_population = ini.get_double("seed", "n_pm", 0.0);
  cfg.seed_spec.k_single_um_inv = ini.get_double("seed", "k_single", 0.0);
  cfg.seed_spec.amp_single = ini.get_double("seed", "amp_single", 0.0);
  cfg.seed_spec.scale = ini.get_double("seed", "seed_scale", 1.0);
  const std::string basis = ini.get_or("seed", "basis", "bare");
  if (basis == "bare") cfg.seed_spec.basis = seed::SeedBasis::Bare;
  else if (basis == "bogoliubov") cfg.seed_spec.basis = seed::SeedBasis::Bogoliubov;
  else throw ConfigError("[seed] basis: unknown value '" + basis + "'");
  if (cfg.seed_spec.thermal_population < 0.0)
    throw ConfigError("[seed] n_pm must be >= 0");

  cfg.protocol.q_initial_hhz = ini.get_double("evolve", "qi_hz", 40.0);
  cfg.protocol.q_final_hhz = ini.get_double("evolve", "qf_hz", 2.0);
  cfg.protocol.ramp_ms = ini.get_double("evolve", "ramp_ms", 5.0);
  cfg.protocol.hold_ms = ini.get_double("evolve", "hold_ms", 152.0);
  cfg.protocol.q_mu_hhz = ini.get_double("evolve", "q_mu_hz", 0.0);
  const std::string shape = ini.get_or("evolve", "ramp_shape", "linear_q");
  if (shape == "linear_q") cfg.protocol.shape = dynamics::RampShape::LinearQ;
  else if (shape == "linear_b") cfg.protocol.shape = dynamics::RampShape::LinearB;
  else throw ConfigError("[evolve] ramp_shape: unknown value '" + shape + "'");
  if (cfg.protocol.ramp_ms < 0.0 || cfg.protocol.hold_ms < 0.0)
    throw ConfigError("[evolve] ramp_ms/hold_ms must be >= 0");
  cfg.seed_spec.q_at_seed_hhz = cfg.protocol.q_initial_hhz;

  cfg.evo.dt_ms = ini.get_double("evolve", "dt_ms", 0.0125);
  if (!(cfg.evo.dt_ms > 0.0)) throw ConfigError("[evolve] dt_ms must be > 0");
  cfg.evo.record_ms = ini.get_double_list("evolve", "record_ms");
  if (!std::is_sorted(cfg.evo.record_ms.begin(), cfg.evo.record_ms.end()))
    throw ConfigError("[evolve] record_ms must be sorted ascending");
  cfg.evo.frozen_density = ini.get_bool("evolve", "frozen_density", false);
  cfg.evo.terms.kinetic = ini.get_bool("evolve", "kinetic", true);
  cfg.evo.terms.trap = cfg.trap_enabled;
  cfg.evo.terms.quadratic_zeeman = ini.get_bool("evolve", "quadratic_zeeman", true);
  cfg.evo.terms.c0_density = ini.get_bool("evolve", "c0_density", true);
  cfg.evo.terms.c2_spin = ini.get_bool("evolve", "c2_spin", true);

  cfg.region_x_um = ini.get_double("analysis", "region_x_um", 16.0);
  cfg.region_z_um = ini.get_double("analysis", "region_z_um", 124.0);
  const std::string axis = ini.get_or("analysis", "domain_axis", "long_z");
  if (axis == "long_z") cfg.domain_axis = analysis::DomainAxis::LongZ;
  else if (axis == "radial") cfg.domain_axis = analysis::DomainAxis::Radial;
  else throw ConfigError("[analysis] domain_axis: unknown value '" + axis + "'");
  cfg.noise_subtraction = ini.get_double("analysis", "noise_subtraction", 0.0);
  cfg.t_m_ms = ini.get_double("analysis", "t_m_ms", 77.0);
  cfg.fit_window_ms = ini.get_double("analysis", "fit_window_ms", 90.0);
  cfg.evo.g0_region_x_um = cfg.region_x_um;
  cfg.evo.g0_region_z_um = cfg.region_z_um;

  cfg.sweep_qf_hhz = ini.get_double_list("sweep", "qf_hz");
  cfg.sweep_repetitions = static_cast<int>(ini.get_int("sweep", "repetitions", 1));
  if (cfg.sweep_repetitions < 1)
    throw ConfigError("[sweep] repetitions must be >= 1");
  cfg.sweep_measure_t_ms = ini.get_double("sweep", "measure_t_ms", 87.0);

  cfg.config_snapshot = ini.to_string();
  return cfg;
}

TrajectoryResult run_trajectory(const SimConfig& cfg, uint64_t rng_seed,
                                const std::string& out_dir,
                                const std::string& tag) {
  TrajectoryResult res;
  res.rng_seed = rng_seed;
  try {
    field::SpinField f =
        seed::ground_state(cfg.grid, cfg.couplings, cfg.trap, cfg.ground);
    seed::SeedSpec spec = cfg.seed_spec;
    spec.rng_seed = rng_seed;
    seed::apply_seed(f, spec, cfg.couplings);

    dynamics::Stepper stepper(cfg.grid, cfg.couplings, cfg.trap);

    dynamics::SnapshotCallback on_snapshot = nullptr;
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      on_snapshot = [&](double t_ms, const field::SpinField& snap) {
        char name[128];
        std::snprintf(name, sizeof(name), "%smaps_t%07.2f", tag.c_str(), t_ms);
        io::write_field_dump(out_dir + "/" + name, snap, t_ms, rng_seed);
        res.outputs.push_back(std::string(name) + ".bin");
        res.outputs.push_back(std::string(name) + ".json");
      };
    }

    res.record = stepper.evolve(f, cfg.protocol, cfg.evo, on_snapshot);

    if (!out_dir.empty()) {
      std::vector<io::PopulationsRow> rows;
      for (size_t i = 0; i < res.record.times_ms.size(); ++i)
        rows.push_back({res.record.times_ms[i], res.record.populations[i][0],
                        res.record.populations[i][1],
                        res.record.populations[i][2], res.record.g0[i]});
      const std::string pops = tag + "populations.csv";
      io::write_populations_csv(out_dir + "/" + pops, rows);
      res.outputs.push_back(pops);
    }
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

namespace {

// Minimal worker pool; tasks indexed so results land in input order.
void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n_tasks));
  if (jobs == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

} // namespace

std::vector<SweepCell> run_sweep(const SimConfig& cfg, uint64_t base_seed,
                                 int jobs) {
  if (cfg.sweep_qf_hhz.empty())
    throw ConfigError("[sweep] qf_hz list is empty");
  const int reps = cfg.sweep_repetitions;
  const int n_cells = static_cast<int>(cfg.sweep_qf_hhz.size());
  const int n_tasks = n_cells * reps;

  struct TaskOut {
    bool ok = false;
    std::string error;
    double g0 = 0.0;
    double ld = 0.0;
    bool has_ld = false;
  };
  std::vector<TaskOut> outs(static_cast<size_t>(n_tasks));

  parallel_for(n_tasks, jobs, [&](int task) {
    const int cell = task / reps;
    SimConfig local = cfg;
    local.protocol.q_final_hhz = cfg.sweep_qf_hhz[static_cast<size_t>(cell)];
    local.protocol.hold_ms =
        std::max(0.0, cfg.sweep_measure_t_ms - local.protocol.ramp_ms);
    local.evo.record_ms = {cfg.sweep_measure_t_ms};
    local.evo.store_snapshots = true;

    TaskOut& out = outs[static_cast<size_t>(task)];
    const TrajectoryResult tr =
        run_trajectory(local, base_seed + static_cast<uint64_t>(task), "", "");
    if (!tr.ok) {
      out.error = tr.error;
      return;
    }
    if (tr.record.g0.empty()) {
      out.error = "no record produced";
      return;
    }
    out.g0 = tr.record.g0.back();
    try {
      const auto maps = field::observables(tr.record.snapshots.back());
      const auto region = analysis::Region::centered(
          local.grid, local.region_x_um, local.region_z_um);
      const auto corr = analysis::correlation(maps, region);
      out.ld = analysis::domain_size_um(corr, local.domain_axis);
      out.has_ld = true;
    } catch (const std::domain_error&) {
      out.has_ld = false; // long-ranged: no minimum in the window
    }
    out.ok = true;
  });

  std::vector<SweepCell> cells(static_cast<size_t>(n_cells));
  for (int cidx = 0; cidx < n_cells; ++cidx) {
    SweepCell& cell = cells[static_cast<size_t>(cidx)];
    cell.qf_hhz = cfg.sweep_qf_hhz[static_cast<size_t>(cidx)];
    cell.requested = reps;
    std::vector<double> g0s, lds;
    std::string err;
    for (int r = 0; r < reps; ++r) {
      const TaskOut& out = outs[static_cast<size_t>(cidx * reps + r)];
      if (!out.ok) {
        err = out.error;
        continue;
      }
      ++cell.completed;
      g0s.push_back(out.g0);
      if (out.has_ld) lds.push_back(out.ld);
    }
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      mean = 0.0;
      se = 0.0;
      if (v.empty()) return;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                       static_cast<double>(v.size()));
      }
    };
    mean_se(g0s, cell.g0_mean, cell.g0_se);
    mean_se(lds, cell.ld_mean_um, cell.ld_se_um);
    cell.ld_count = static_cast<int>(lds.size());
    if (cell.completed == 0)
      cell.status = "failed: " + err;
    else if (cell.completed < reps)
      cell.status = "partial: " + err;
  }
  return cells;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "qf_hz,requested,completed,G0_mean,G0_se,ld_mean_um,ld_se_um,ld_count,"
         "status\n";
  char buf[512];
  for (const auto& cl : cells) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%d,",
                  cl.qf_hhz, cl.requested, cl.completed, cl.g0_mean, cl.g0_se,
                  cl.ld_mean_um, cl.ld_se_um, cl.ld_count);
    out << buf << cl.status << "\n";
  }
}

void write_manifest(const std::string& path, const std::string& command,
                    const SimConfig& cfg, uint64_t base_seed, int jobs,
                    const std::vector<ManifestEntry>& entries,
                    double wall_seconds) {
  json m;
  m["tool"] = "spinquench";
  m["version"] = kVersion;
  m["command"] = command;
  const std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["created_utc"] = stamp;
  m["jobs"] = jobs;
  m["base_seed"] = base_seed;
  m["config_ini"] = cfg.config_snapshot;
  m["wall_seconds"] = wall_seconds;
  json trajs = json::array();
  for (const auto& e : entries) {
    json t;
    t["index"] = e.index;
    t["rng_seed"] = e.rng_seed;
    t["status"] = e.status;
    t["outputs"] = e.outputs;
    trajs.push_back(t);
  }
  m["trajectories"] = trajs;
  io::write_text_file(path, m.dump(2) + "\n");
}

} // namespace spinq::run
