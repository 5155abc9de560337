#pragma once

#include <optional>
#include <vector>

#include "spinquench/field.hpp"

namespace spinq::analysis {

// Index rectangle into a grid; factory for the centered analysis region.
struct Region {
  int ix0 = 0;
  int iz0 = 0;
  int nx = 0;
  int nz = 0;

  static Region centered(const field::Grid2D& g, double width_x_um,
                         double width_z_um);
  static Region full(const field::Grid2D& g);
};

// Density-normalized magnetization correlation:
//   G(dr) = sum_r M(r+dr).M(r) / [(g_F mu_B)^2 sum_r n(r+dr) n(r)]
// with the transverse dot product Re[F_perp*(r+dr) F_perp(r)] and windowed
// sums (both r and r+dr inside the region). The magnetic-moment factors
// cancel against M = g_F mu_B F_perp.
struct CorrelationResult {
  std::vector<double> lag_x_um; // size nlx, symmetric about 0
  std::vector<double> lag_z_um; // size nlz
  std::vector<double> g;        // nlx * nlz, row-major (x slow), NaN where empty
  double g0 = 0.0;              // G at zero lag

  double at(int jx, int jz) const {
    return g[static_cast<size_t>(jx) * lag_z_um.size() + jz];
  }
};

CorrelationResult correlation(const field::ObservableMaps& maps,
                              const Region& region);

enum class DomainAxis { LongZ, Radial };

// Lag of the first local minimum of the G profile (long z axis by default),
// refined between samples. Throws std::domain_error if no minimum exists in
// the lag window (long-ranged case).
double domain_size_um(const CorrelationResult& corr,
                      DomainAxis axis = DomainAxis::LongZ);

struct FitGridSpec {
  int n_g0 = 61;
  int n_tau = 61;
  double g0_span = 1.6;  // multiplicative half-range around the optimum
  double tau_span = 1.6;
  double window_ms = 90.0; // only points with t <= window enter the fit
};

struct GrowthFit {
  double g0_tm = 0.0; // G(0) at t = t_m
  double tau_ms = 0.0;
  double t_m_ms = 0.0;
  double chi2_min = 0.0;
  bool weighted = false;
  double sigma_scale2 = 1.0; // unweighted: residual variance used to scale chi2
  std::vector<double> g0_axis;
  std::vector<double> tau_axis;
  std::vector<double> delta_chi2; // n_g0 * n_tau, row-major (g0 slow)
  // 1/2/3 sigma level sets (delta chi2 = 2.30, 6.18, 11.83 for 2 params),
  // as segment soups {g0_a, tau_a, g0_b, tau_b}.
  std::array<std::vector<std::array<double, 4>>, 3> sigma_contours;

  // Delta chi2 at arbitrary parameters (for coverage checks).
  double delta_chi2_at(double g0, double tau,
                       const std::vector<double>& t_ms,
                       const std::vector<double>& g0_series,
                       const std::vector<double>& sigma) const;
};

inline constexpr double kSigmaLevels2Param[3] = {2.30, 6.18, 11.83};

// Least-squares fit of G(0)|_t = g0_tm sqrt(t/t_m) exp[(t-t_m)/tau].
// With per-point errors `sigma` (same length as t_ms): weighted chi^2 in
// linear space. Without: unweighted least squares in log space.
GrowthFit fit_growth(const std::vector<double>& t_ms,
                     const std::vector<double>& g0,
                     const std::vector<double>& sigma, double t_m_ms,
                     const FitGridSpec& grid = {});

double gain_db(double g0_initial, double g0_final);

struct EnsembleSeries {
  std::vector<double> mean;
  std::vector<double> std_error;
};

// Pointwise mean and standard error across runs (equal lengths required).
EnsembleSeries ensemble_average(const std::vector<std::vector<double>>& runs);

// max |Fz| over the region divided by max |F| (total spin magnitude).
double longitudinal_fraction(const field::ObservableMaps& maps,
                             const Region& region);

} // namespace spinq::analysis
