// spinquench: spin-1 condensate quench amplifier simulator.
// Subcommands: spectrum, simulate, sweep, analyze, fit.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinquench/analysis.hpp"
#include "spinquench/constants.hpp"
#include "spinquench/dynamics.hpp"
#include "spinquench/io.hpp"
#include "spinquench/run.hpp"
#include "spinquench/spectrum.hpp"

namespace {

using nlohmann::json;
namespace sq = spinq;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string default_out_dir() {
  const char* env = std::getenv("SPINQUENCH_OUT_DIR");
  return env && *env ? env : ".";
}

sq::run::SimConfig load_cfg(const std::string& config_path,
                            const std::string& preset) {
  sq::io::Ini ini = config_path.empty()
                        ? sq::io::Ini::parse_string(sq::run::preset_config(preset))
                        : sq::io::Ini::parse_file(config_path);
  return sq::run::load_config(ini);
}

json contours_json(const sq::analysis::GrowthFit& fit) {
  json contours = json::array();
  const char* names[3] = {"1sigma", "2sigma", "3sigma"};
  for (int lev = 0; lev < 3; ++lev) {
    json segs = json::array();
    for (const auto& s : fit.sigma_contours[static_cast<size_t>(lev)])
      segs.push_back({s[0], s[1], s[2], s[3]});
    contours.push_back({{"level", names[lev]},
                        {"delta_chi2", sq::analysis::kSigmaLevels2Param[lev]},
                        {"segments_g0_tau", segs}});
  }
  return contours;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-1 condensate quench simulator"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand name

  std::string config_path;
  std::string out_dir = default_out_dir();
  std::string preset = "paper";
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  uint64_t seed_override = 0;
  bool seed_given = false;

  app.add_option("--config", config_path, "INI config file");
  app.add_option("--out-dir", out_dir,
                 "output directory (default $SPINQUENCH_OUT_DIR or '.')");
  app.add_option("--jobs", jobs, "worker threads for ensembles");
  auto* seed_opt = app.add_option("--seed", seed_override, "base RNG seed override");
  app.add_option("--preset", preset, "built-in config when --config is absent")
      ->check(CLI::IsMember({"paper", "quick"}));

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "emit the amplifier spectrum as CSV");
  double sp_q0 = 0.0, sp_q = 0.0, sp_kmax = 0.0;
  int sp_nk = 4096;
  std::string sp_out = "spectrum.csv";
  sp->add_option("--q0-hz", sp_q0, "critical quadratic Zeeman shift / h")->required();
  sp->add_option("--q-hz", sp_q, "final quadratic Zeeman shift / h")->required();
  sp->add_option("--k-max", sp_kmax, "max wavevector (1/um), default 4/xi_s");
  sp->add_option("--n-k", sp_nk, "number of samples");
  sp->add_option("--out", sp_out, "output CSV name");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one seeded trajectory");
  bool sim_no_maps = false;
  sim->add_flag("--no-maps", sim_no_maps, "skip field map dumps");

  // sweep
  auto* sw = app.add_subcommand("sweep", "ensemble sweep over q_f values");

  // analyze
  auto* an = app.add_subcommand("analyze", "correlation analysis of a map dump");
  std::string an_input;
  std::string an_stem = "correlation";
  double an_rx = 16.0, an_rz = 124.0;
  std::string an_axis = "long_z";
  an->add_option("--input", an_input, "sidecar JSON of a field dump")->required();
  an->add_option("--out-stem", an_stem, "output stem for CSV/JSON");
  an->add_option("--region-x-um", an_rx, "analysis region width (0 = full)");
  an->add_option("--region-z-um", an_rz, "analysis region length (0 = full)");
  an->add_option("--axis", an_axis, "domain-size profile axis")
      ->check(CLI::IsMember({"long_z", "radial"}));

  // fit
  auto* ft = app.add_subcommand("fit", "growth fit of a G0 time series");
  std::string ft_input;
  std::string ft_out = "fit.json";
  double ft_tm = 77.0, ft_window = 90.0;
  std::string ft_kind = "series";
  ft->add_option("--input", ft_input, "CSV with t_ms,G0[,std_error]")->required();
  ft->add_option("--input-kind", ft_kind,
                 "series (t,G0[,se]) or populations (uses the G0_center column)")
      ->check(CLI::IsMember({"series", "populations"}));
  ft->add_option("--out", ft_out, "output JSON name");
  ft->add_option("--t-m-ms", ft_tm, "reference time t_m");
  ft->add_option("--window-ms", ft_window, "fit window upper edge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  seed_given = seed_opt->count() > 0;

  try {
    std::filesystem::create_directories(out_dir);

    if (sp->parsed()) {
      if (!(sp_q0 > 0.0)) throw sq::io::ConfigError("--q0-hz must be > 0");
      const double coeff =
          sq::constants::kinetic_coeff_um2_hz(sq::constants::rb87_mass_si);
      if (sp_kmax <= 0.0) {
        // default 4/xi_s at the paper density
        const double xi =
            1.0e6 / std::sqrt(8.0 * sq::constants::pi * 2.6e20 *
                              1.4 * sq::constants::bohr_radius_si);
        sp_kmax = 4.0 / xi;
      }
      const auto table =
          sq::spectrum::spectrum_table(sp_q, sp_q0, coeff, sp_kmax, sp_nk);
      sq::io::write_spectrum_csv(out_dir + "/" + sp_out, table);
      std::printf("wrote %s/%s (%d rows)\n", out_dir.c_str(), sp_out.c_str(), sp_nk);
      return kExitOk;
    }

    if (sim->parsed() || sw->parsed()) {
      const auto t0 = std::chrono::steady_clock::now();
      sq::run::SimConfig cfg = load_cfg(config_path, preset);
      const uint64_t base_seed =
          seed_given ? seed_override : cfg.seed_spec.rng_seed;

      if (sim->parsed()) {
        const auto res = sq::run::run_trajectory(
            cfg, base_seed, sim_no_maps ? std::string() : out_dir, "");
        if (!res.ok) {
          std::fprintf(stderr, "error: %s\n", res.error.c_str());
          return kExitNumerical;
        }
        std::vector<sq::io::PopulationsRow> rows;
        for (size_t i = 0; i < res.record.times_ms.size(); ++i)
          rows.push_back({res.record.times_ms[i], res.record.populations[i][0],
                          res.record.populations[i][1],
                          res.record.populations[i][2], res.record.g0[i]});
        if (sim_no_maps) {
          sq::io::write_populations_csv(out_dir + "/populations.csv", rows);
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        sq::run::ManifestEntry entry{0, base_seed, "ok", res.outputs};
        if (sim_no_maps) entry.outputs.push_back("populations.csv");
        sq::run::write_manifest(out_dir + "/manifest.json", "simulate", cfg,
                                base_seed, 1, {entry}, wall);
        std::printf("simulate: %zu records, %.1f s\n",
                    res.record.times_ms.size(), wall);
        return kExitOk;
      }

      // sweep
      const auto cells = sq::run::run_sweep(cfg, base_seed, jobs);
      sq::run::write_sweep_csv(out_dir + "/sweep.csv", cells);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      std::vector<sq::run::ManifestEntry> entries;
      for (size_t i = 0; i < cells.size(); ++i)
        entries.push_back({static_cast<int>(i),
                           base_seed + i * static_cast<uint64_t>(cfg.sweep_repetitions),
                           cells[i].status,
                           {"sweep.csv"}});
      sq::run::write_manifest(out_dir + "/manifest.json", "sweep", cfg,
                              base_seed, jobs, entries, wall);
      bool all_failed = true;
      for (const auto& cl : cells)
        if (cl.completed > 0) all_failed = false;
      std::printf("sweep: %zu cells, %.1f s\n", cells.size(), wall);
      return all_failed ? kExitNumerical : kExitOk;
    }

    if (an->parsed()) {
      const auto f = sq::io::read_field_dump(an_input);
      const auto maps = sq::field::observables(f);
      const auto region = sq::analysis::Region::centered(f.grid, an_rx, an_rz);
      const auto corr = sq::analysis::correlation(maps, region);

      std::ofstream csv(out_dir + "/" + an_stem + ".csv");
      if (!csv) throw std::runtime_error("cannot write correlation CSV");
      csv << "dx_um,dz_um,G\n";
      char buf[160];
      for (size_t jx = 0; jx < corr.lag_x_um.size(); ++jx)
        for (size_t jz = 0; jz < corr.lag_z_um.size(); ++jz) {
          std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.17g\n",
                        corr.lag_x_um[jx], corr.lag_z_um[jz],
                        corr.at(static_cast<int>(jx), static_cast<int>(jz)));
          csv << buf;
        }

      json summary;
      summary["g0"] = corr.g0;
      summary["region"] = {{"x_um", an_rx}, {"z_um", an_rz}};
      try {
        const auto axis = an_axis == "radial" ? sq::analysis::DomainAxis::Radial
                                              : sq::analysis::DomainAxis::LongZ;
        summary["l_d_um"] = sq::analysis::domain_size_um(corr, axis);
      } catch (const std::domain_error&) {
        summary["l_d_um"] = nullptr; // long-ranged, no minimum in window
      }
      sq::io::write_text_file(out_dir + "/" + an_stem + ".json",
                              summary.dump(2) + "\n");
      std::printf("analyze: g0 = %.6g\n", corr.g0);
      return kExitOk;
    }

    if (ft->parsed()) {
      std::vector<sq::io::SeriesPoint> series;
      if (ft_kind == "populations") {
        for (const auto& row : sq::io::read_populations_csv(ft_input))
          series.push_back({row.t_ms, row.g0_center, 0.0});
      } else {
        series = sq::io::read_series_csv(ft_input);
      }
      std::vector<double> t, g0, se;
      bool weighted = true;
      for (const auto& p : series) {
        t.push_back(p.t_ms);
        g0.push_back(p.g0);
        se.push_back(p.std_error);
        if (!(p.std_error > 0.0)) weighted = false;
      }
      if (!weighted) se.clear();
      sq::analysis::FitGridSpec gs;
      gs.window_ms = ft_window;
      const auto fit = sq::analysis::fit_growth(t, g0, se, ft_tm, gs);
      json out;
      out["g0_tm"] = fit.g0_tm;
      out["tau_ms"] = fit.tau_ms;
      out["t_m_ms"] = fit.t_m_ms;
      out["weighted"] = fit.weighted;
      out["chi2_min"] = fit.chi2_min;
      out["contours"] = contours_json(fit);
      sq::io::write_text_file(out_dir + "/" + ft_out, out.dump(2) + "\n");
      std::printf("fit: g0_tm = %.6g, tau = %.4g ms\n", fit.g0_tm, fit.tau_ms);
      return kExitOk;
    }
  } catch (const sq::io::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const sq::dynamics::NumericalAbort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
