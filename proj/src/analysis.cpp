#include "spinquench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinquench/fft.hpp"

namespace spinq::analysis {

using field::cplx;
using field::Grid2D;

Region Region::centered(const Grid2D& g, double width_x_um, double width_z_um) {
  int hx = width_x_um > 0.0
               ? static_cast<int>(std::lround(0.5 * width_x_um / g.dx_um))
               : g.nx / 2;
  int hz = width_z_um > 0.0
               ? static_cast<int>(std::lround(0.5 * width_z_um / g.dz_um))
               : g.nz / 2;
  hx = std::clamp(hx, 1, g.nx / 2);
  hz = std::clamp(hz, 1, g.nz / 2);
  return Region{g.nx / 2 - hx, g.nz / 2 - hz, 2 * hx, 2 * hz};
}

Region Region::full(const Grid2D& g) { return Region{0, 0, g.nx, g.nz}; }

namespace {

void check_region(const Grid2D& g, const Region& r) {
  if (r.nx < 1 || r.nz < 1 || r.ix0 < 0 || r.iz0 < 0 ||
      r.ix0 + r.nx > g.nx || r.iz0 + r.nz > g.nz)
    throw std::invalid_argument("analysis: region outside grid or empty");
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

} // namespace

CorrelationResult correlation(const field::ObservableMaps& maps,
                              const Region& region) {
  const Grid2D& g = maps.grid;
  check_region(g, region);

  const int rnx = region.nx, rnz = region.nz;
  const int px = next_pow2(2 * rnx);
  const int pz = next_pow2(2 * rnz);
  fft::Fft2d fft(px, pz);

  const size_t pn = static_cast<size_t>(px) * pz;
  std::vector<cplx> fa(pn, cplx(0.0, 0.0)); // F_perp, zero padded
  std::vector<cplx> wa(pn, cplx(0.0, 0.0)); // density
  double den_check = 0.0;
  for (int ix = 0; ix < rnx; ++ix)
    for (int iz = 0; iz < rnz; ++iz) {
      const size_t src = g.idx(region.ix0 + ix, region.iz0 + iz);
      const size_t dst = static_cast<size_t>(ix) * pz + iz;
      fa[dst] = maps.f_perp[src];
      wa[dst] = maps.density[src];
      den_check += maps.density[src];
    }
  if (!(den_check > 0.0))
    throw std::invalid_argument("correlation: density vanishes on the region");

  // windowed cross-correlations via zero-padded FFTs:
  // C(d) = sum_r a(r+d) a*(r) = IFFT(|FFT(a)|^2)[d]
  fft.forward(fa);
  fft.forward(wa);
  for (size_t i = 0; i < pn; ++i) {
    fa[i] = cplx(std::norm(fa[i]), 0.0);
    wa[i] = cplx(std::norm(wa[i]), 0.0);
  }
  fft.backward(fa);
  fft.backward(wa);

  CorrelationResult out;
  const int nlx = 2 * rnx - 1, nlz = 2 * rnz - 1;
  out.lag_x_um.resize(nlx);
  out.lag_z_um.resize(nlz);
  for (int j = 0; j < nlx; ++j) out.lag_x_um[j] = (j - (rnx - 1)) * g.dx_um;
  for (int j = 0; j < nlz; ++j) out.lag_z_um[j] = (j - (rnz - 1)) * g.dz_um;
  out.g.assign(static_cast<size_t>(nlx) * nlz,
               std::numeric_limits<double>::quiet_NaN());

  const double den0 = wa[0].real();
  for (int jx = 0; jx < nlx; ++jx) {
    const int dx = jx - (rnx - 1);
    const int ux = dx >= 0 ? dx : px + dx;
    for (int jz = 0; jz < nlz; ++jz) {
      const int dz = jz - (rnz - 1);
      const int uz = dz >= 0 ? dz : pz + dz;
      const size_t u = static_cast<size_t>(ux) * pz + uz;
      const double den = wa[u].real();
      if (den > 1e-12 * den0)
        out.g[static_cast<size_t>(jx) * nlz + jz] = fa[u].real() / den;
    }
  }
  out.g0 = out.at(rnx - 1, rnz - 1);
  return out;
}

namespace {

// first local minimum of prof[j] (j >= 1), sub-sample refined
double first_minimum(const std::vector<double>& prof, double dstep) {
  const int n = static_cast<int>(prof.size());
  for (int j = 1; j + 1 < n; ++j) {
    if (std::isnan(prof[j]) || std::isnan(prof[j + 1])) break;
    if (prof[j] < prof[j - 1] && prof[j] <= prof[j + 1]) {
      const double denom = prof[j - 1] - 2.0 * prof[j] + prof[j + 1];
      double off = 0.0;
      if (denom > 0.0) off = 0.5 * (prof[j - 1] - prof[j + 1]) / denom;
      off = std::clamp(off, -0.5, 0.5);
      return (j + off) * dstep;
    }
  }
  throw std::domain_error("domain_size: no minimum in the lag window");
}

} // namespace

double domain_size_um(const CorrelationResult& corr, DomainAxis axis) {
  const int nlx = static_cast<int>(corr.lag_x_um.size());
  const int nlz = static_cast<int>(corr.lag_z_um.size());
  const int cx = (nlx - 1) / 2, cz = (nlz - 1) / 2;
  const double dz = nlz > 1 ? corr.lag_z_um[cz + 1] - corr.lag_z_um[cz] : 1.0;

  if (axis == DomainAxis::LongZ) {
    std::vector<double> prof(static_cast<size_t>(nlz - cz));
    for (int j = cz; j < nlz; ++j) prof[static_cast<size_t>(j - cz)] = corr.at(cx, j);
    return first_minimum(prof, dz);
  }

  // radial: average G over rings of width dz
  const int nr = nlz - cz;
  std::vector<double> sum(static_cast<size_t>(nr), 0.0);
  std::vector<int> cnt(static_cast<size_t>(nr), 0);
  for (int jx = 0; jx < nlx; ++jx)
    for (int jz = 0; jz < nlz; ++jz) {
      const double v = corr.at(jx, jz);
      if (std::isnan(v)) continue;
      const double r = std::hypot(corr.lag_x_um[jx], corr.lag_z_um[jz]);
      const int b = static_cast<int>(std::lround(r / dz));
      if (b < nr) {
        sum[static_cast<size_t>(b)] += v;
        cnt[static_cast<size_t>(b)] += 1;
      }
    }
  std::vector<double> prof(static_cast<size_t>(nr),
                           std::numeric_limits<double>::quiet_NaN());
  for (int b = 0; b < nr; ++b)
    if (cnt[static_cast<size_t>(b)] > 0)
      prof[static_cast<size_t>(b)] = sum[static_cast<size_t>(b)] / cnt[static_cast<size_t>(b)];
  return first_minimum(prof, dz);
}

namespace {

double model_shape(double t, double t_m, double inv_tau) {
  return std::sqrt(t / t_m) * std::exp((t - t_m) * inv_tau);
}

struct FitData {
  std::vector<double> t, y, sig;
};

// chi^2 with g profiled out analytically for fixed 1/tau
double chi2_profiled(const FitData& d, double inv_tau, double* g_hat) {
  double sfy = 0.0, sff = 0.0;
  for (size_t i = 0; i < d.t.size(); ++i) {
    const double f = model_shape(d.t[i], 1.0, inv_tau); // t_m folded into y
    const double w = 1.0 / (d.sig[i] * d.sig[i]);
    sfy += w * f * d.y[i];
    sff += w * f * f;
  }
  const double gh = sff > 0.0 ? sfy / sff : 0.0;
  double chi2 = 0.0;
  for (size_t i = 0; i < d.t.size(); ++i) {
    const double r = (d.y[i] - gh * model_shape(d.t[i], 1.0, inv_tau)) / d.sig[i];
    chi2 += r * r;
  }
  if (g_hat) *g_hat = gh;
  return chi2;
}

} // namespace

double gain_db(double g0_initial, double g0_final) {
  if (!(g0_initial > 0.0) || !(g0_final > 0.0))
    throw std::invalid_argument("gain_db: inputs must be > 0");
  return 10.0 * std::log10(g0_final / g0_initial);
}

GrowthFit fit_growth(const std::vector<double>& t_ms,
                     const std::vector<double>& g0,
                     const std::vector<double>& sigma, double t_m_ms,
                     const FitGridSpec& grid) {
  if (t_ms.size() != g0.size())
    throw std::invalid_argument("fit_growth: series length mismatch");
  if (!sigma.empty() && sigma.size() != t_ms.size())
    throw std::invalid_argument("fit_growth: sigma length mismatch");
  if (!(t_m_ms > 0.0)) throw std::invalid_argument("fit_growth: t_m must be > 0");

  std::vector<double> t, v, s;
  for (size_t i = 0; i < t_ms.size(); ++i) {
    if (t_ms[i] > grid.window_ms || !(t_ms[i] > 0.0)) continue;
    if (!(g0[i] > 0.0))
      throw std::invalid_argument("fit_growth: non-positive G(0) in window");
    t.push_back(t_ms[i]);
    v.push_back(g0[i]);
    if (!sigma.empty()) {
      if (!(sigma[i] > 0.0))
        throw std::invalid_argument("fit_growth: non-positive sigma");
      s.push_back(sigma[i]);
    }
  }
  if (t.size() < 3)
    throw std::invalid_argument("fit_growth: need at least 3 points with t <= window");
  if (*std::max_element(v.begin(), v.end()) ==
      *std::min_element(v.begin(), v.end()))
    throw std::invalid_argument("fit_growth: degenerate constant series");

  GrowthFit fit;
  fit.t_m_ms = t_m_ms;
  fit.weighted = !s.empty();

  if (!fit.weighted) {
    // log space: ln G - 0.5 ln(t/t_m) = ln g + (t - t_m)/tau, linear LS
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
      const double x = t[i] - t_m_ms;
      const double y = std::log(v[i]) - 0.5 * std::log(t[i] / t_m_ms);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30)
      throw std::invalid_argument("fit_growth: degenerate time grid");
    const double slope = (n * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / n;
    if (!(slope > 0.0))
      throw std::domain_error("fit_growth: series does not grow (tau <= 0)");
    fit.tau_ms = 1.0 / slope;
    fit.g0_tm = std::exp(icept);
    double sse = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
      const double r = std::log(v[i]) - 0.5 * std::log(t[i] / t_m_ms) -
                       (icept + slope * (t[i] - t_m_ms));
      sse += r * r;
    }
    fit.chi2_min = sse;
    fit.sigma_scale2 = t.size() > 2 ? std::max(sse / (n - 2.0), 1e-300) : 1.0;
  } else {
    FitData d;
    d.t.resize(t.size());
    d.y = v;
    d.sig = s;
    for (size_t i = 0; i < t.size(); ++i) d.t[i] = t[i] / t_m_ms; // t_m := 1
    // coarse scan in 1/tau (units of 1/t_m), then golden-section refine
    const double lo = 1e-4, hi = 50.0;
    int best = 0;
    double best_chi = std::numeric_limits<double>::infinity();
    const int n_scan = 400;
    std::vector<double> svals(n_scan);
    for (int i = 0; i < n_scan; ++i) {
      svals[static_cast<size_t>(i)] = lo * std::pow(hi / lo, i / double(n_scan - 1));
      const double chi = chi2_profiled(d, svals[static_cast<size_t>(i)], nullptr);
      if (chi < best_chi) { best_chi = chi; best = i; }
    }
    double a = svals[static_cast<size_t>(std::max(0, best - 1))];
    double b = svals[static_cast<size_t>(std::min(n_scan - 1, best + 1))];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = chi2_profiled(d, x1, nullptr), f2 = chi2_profiled(d, x2, nullptr);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * b; ++it) {
      if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = chi2_profiled(d, x1, nullptr); }
      else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = chi2_profiled(d, x2, nullptr); }
    }
    const double s_opt = 0.5 * (a + b);
    double g_hat = 0.0;
    fit.chi2_min = chi2_profiled(d, s_opt, &g_hat);
    if (!(g_hat > 0.0))
      throw std::domain_error("fit_growth: fitted amplitude not positive");
    fit.tau_ms = t_m_ms / s_opt;
    fit.g0_tm = g_hat;
    fit.sigma_scale2 = 1.0;
  }

  // chi^2 surface and sigma contours on a log-spaced grid around the optimum
  fit.g0_axis.resize(static_cast<size_t>(grid.n_g0));
  fit.tau_axis.resize(static_cast<size_t>(grid.n_tau));
  for (int i = 0; i < grid.n_g0; ++i)
    fit.g0_axis[static_cast<size_t>(i)] =
        fit.g0_tm * std::pow(grid.g0_span, 2.0 * i / (grid.n_g0 - 1.0) - 1.0);
  for (int j = 0; j < grid.n_tau; ++j)
    fit.tau_axis[static_cast<size_t>(j)] =
        fit.tau_ms * std::pow(grid.tau_span, 2.0 * j / (grid.n_tau - 1.0) - 1.0);

  fit.delta_chi2.resize(static_cast<size_t>(grid.n_g0) * grid.n_tau);
  for (int i = 0; i < grid.n_g0; ++i)
    for (int j = 0; j < grid.n_tau; ++j)
      fit.delta_chi2[static_cast<size_t>(i) * grid.n_tau + j] =
          fit.delta_chi2_at(fit.g0_axis[static_cast<size_t>(i)],
                            fit.tau_axis[static_cast<size_t>(j)], t, v, s);

  // marching-squares level sets
  for (int lev = 0; lev < 3; ++lev) {
    const double L = kSigmaLevels2Param[lev];
    auto& segs = fit.sigma_contours[static_cast<size_t>(lev)];
    for (int i = 0; i + 1 < grid.n_g0; ++i)
      for (int j = 0; j + 1 < grid.n_tau; ++j) {
        const double f00 = fit.delta_chi2[static_cast<size_t>(i) * grid.n_tau + j] - L;
        const double f01 = fit.delta_chi2[static_cast<size_t>(i) * grid.n_tau + j + 1] - L;
        const double f10 = fit.delta_chi2[static_cast<size_t>(i + 1) * grid.n_tau + j] - L;
        const double f11 = fit.delta_chi2[static_cast<size_t>(i + 1) * grid.n_tau + j + 1] - L;
        std::vector<std::array<double, 2>> pts;
        auto edge = [&](double fa, double fb, double ga, double ta, double gb,
                        double tb) {
          if ((fa < 0.0) == (fb < 0.0)) return;
          const double u = fa / (fa - fb);
          pts.push_back({ga + u * (gb - ga), ta + u * (tb - ta)});
        };
        const double g0a = fit.g0_axis[static_cast<size_t>(i)];
        const double g0b = fit.g0_axis[static_cast<size_t>(i + 1)];
        const double ta = fit.tau_axis[static_cast<size_t>(j)];
        const double tb = fit.tau_axis[static_cast<size_t>(j + 1)];
        edge(f00, f01, g0a, ta, g0a, tb);
        edge(f10, f11, g0b, ta, g0b, tb);
        edge(f00, f10, g0a, ta, g0b, ta);
        edge(f01, f11, g0a, tb, g0b, tb);
        if (pts.size() >= 2)
          segs.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
      }
  }
  return fit;
}

double GrowthFit::delta_chi2_at(double g0v, double tau,
                                const std::vector<double>& t_ms,
                                const std::vector<double>& g0_series,
                                const std::vector<double>& sigma) const {
  if (!(tau > 0.0) || !(g0v > 0.0))
    return std::numeric_limits<double>::infinity();
  double chi2 = 0.0;
  if (weighted) {
    for (size_t i = 0; i < t_ms.size(); ++i) {
      const double m = g0v * model_shape(t_ms[i] / t_m_ms, 1.0, t_m_ms / tau);
      const double r = (g0_series[i] - m) / sigma[i];
      chi2 += r * r;
    }
  } else {
    for (size_t i = 0; i < t_ms.size(); ++i) {
      const double r = std::log(g0_series[i]) - 0.5 * std::log(t_ms[i] / t_m_ms) -
                       (std::log(g0v) + (t_ms[i] - t_m_ms) / tau);
      chi2 += r * r;
    }
    chi2 /= sigma_scale2;
  }
  return chi2 - chi2_min / (weighted ? 1.0 : sigma_scale2);
}

EnsembleSeries ensemble_average(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw std::invalid_argument("ensemble_average: no runs");
  const size_t len = runs[0].size();
  for (const auto& r : runs)
    if (r.size() != len)
      throw std::invalid_argument("ensemble_average: mismatched time grids");

  EnsembleSeries out;
  out.mean.resize(len, 0.0);
  out.std_error.resize(len, 0.0);
  const double n = static_cast<double>(runs.size());
  for (size_t i = 0; i < len; ++i) {
    double m = 0.0;
    for (const auto& r : runs) m += r[i];
    m /= n;
    out.mean[i] = m;
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& r : runs) ss += (r[i] - m) * (r[i] - m);
      out.std_error[i] = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  return out;
}

double longitudinal_fraction(const field::ObservableMaps& maps,
                             const Region& region) {
  check_region(maps.grid, region);
  double max_fz = 0.0, max_f = 0.0;
  for (int ix = 0; ix < region.nx; ++ix)
    for (int iz = 0; iz < region.nz; ++iz) {
      const size_t i = maps.grid.idx(region.ix0 + ix, region.iz0 + iz);
      const double fz = std::abs(maps.fz[i]);
      const double f = std::hypot(maps.fz[i], std::abs(maps.f_perp[i]));
      max_fz = std::max(max_fz, fz);
      max_f = std::max(max_f, f);
    }
  return max_f > 0.0 ? max_fz / max_f : 0.0;
}

} // namespace spinq::analysis
