#include "spinquench/seed.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinquench/fft.hpp"
#include "spinquench/rng.hpp"
#include "spinquench/spectrum.hpp"

namespace spinq::seed {

using field::cplx;
using field::Grid2D;
using field::SpinField;

BogoliubovMode bogoliubov_uv(double k_um_inv, double q_hhz, double q0_hhz,
                             double kinetic_coeff) {
  const double a = spectrum::epsilon_hhz(k_um_inv, kinetic_coeff) + q_hhz -
                   0.5 * q0_hhz;
  const double b = -0.5 * q0_hhz; // c2 n in h*Hz
  const double e2 = a * a - b * b; // E_s^2
  if (!(e2 > 0.0) || !(a > 0.0))
    throw std::domain_error("bogoliubov_uv: mode is not stable, u,v undefined");
  const double e = std::sqrt(e2);
  BogoliubovMode m;
  m.k_um_inv = k_um_inv;
  m.u = std::sqrt((a + e) / (2.0 * e));
  m.v = -b / (2.0 * e * m.u);
  return m;
}

double growing_pair_phase(double k_um_inv, double q_hhz, double q0_hhz,
                          double kinetic_coeff) {
  const double a = spectrum::epsilon_hhz(k_um_inv, kinetic_coeff) + q_hhz -
                   0.5 * q0_hhz;
  const double b = -0.5 * q0_hhz;
  const double sig2 = b * b - a * a;
  if (!(sig2 > 0.0))
    throw std::domain_error("growing_pair_phase: mode is not unstable");
  // growing eigenvector of the pair equations has delta_-(-k)* / delta_+(k)
  // = (-a + i sigma)/b; the seeded -k amplitude carries its conjugate phase
  const std::complex<double> ratio(-a / b, std::sqrt(sig2) / b);
  return -std::arg(ratio);
}

namespace {

void require_empty_sidebands(const SpinField& f, const char* op) {
  for (size_t i = 0; i < f.grid.size(); ++i) {
    if (std::norm(f.plus[i]) != 0.0 || std::norm(f.minus[i]) != 0.0)
      throw std::invalid_argument(std::string(op) +
                                  ": psi_+/- must be empty before seeding");
  }
}

// Scalar GPE energy of psi_0 in h*Hz (kinetic + trap + c0 n^2/2).
double scalar_energy(const Grid2D& g, const model::Couplings& cpl,
                     const model::Trap& trap, const std::vector<cplx>& psi,
                     const fft::Fft2d& fft) {
  std::vector<cplx> khat = psi;
  fft.forward(khat);
  const double norm = 1.0 / static_cast<double>(g.size());
  double e_kin = 0.0;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double kx = g.kx_um_inv(ix);
    for (int iz = 0; iz < g.nz; ++iz) {
      const double kz = g.kz_um_inv(iz);
      const double eps = cpl.kinetic_coeff * (kx * kx + kz * kz);
      e_kin += eps * std::norm(khat[g.idx(ix, iz)]) * norm;
    }
  }
  double e_loc = 0.0;
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double n = std::norm(psi[g.idx(ix, iz)]);
      e_loc += trap.potential_hhz(g.x_um(ix), g.z_um(iz)) * n +
               0.5 * cpl.c0_hhz_um2 * n * n;
    }
  return (e_kin + e_loc) * g.cell_area_um2();
}

void normalize_to(std::vector<cplx>& psi, const Grid2D& g, double n_target) {
  double sum = 0.0;
  for (const cplx& v : psi) sum += std::norm(v);
  sum *= g.cell_area_um2();
  if (!(sum > 0.0)) throw std::runtime_error("ground_state: zero-norm state");
  const double s = std::sqrt(n_target / sum);
  for (cplx& v : psi) v *= s;
}

std::vector<cplx> thomas_fermi_profile(const Grid2D& g,
                                       const model::Couplings& cpl,
                                       const model::Trap& trap, double n_atoms) {
  if (!trap.enabled)
    throw std::invalid_argument("ground_state: Thomas-Fermi needs a trap");
  if (!(cpl.c0_hhz_um2 > 0.0))
    throw std::invalid_argument("ground_state: Thomas-Fermi needs c0 > 0");
  const double mu = std::sqrt(2.0 * cpl.c0_hhz_um2 * n_atoms *
                              std::sqrt(trap.beta_x_hz_um2 * trap.beta_z_hz_um2) /
                              constants::pi);
  std::vector<cplx> psi(g.size());
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double v = trap.potential_hhz(g.x_um(ix), g.z_um(iz));
      const double n = std::max(0.0, (mu - v) / cpl.c0_hhz_um2);
      psi[g.idx(ix, iz)] = std::sqrt(n);
    }
  normalize_to(psi, g, n_atoms);
  return psi;
}

} // namespace

SpinField ground_state(const Grid2D& grid, const model::Couplings& cpl,
                       const model::Trap& trap, const GroundStateSpec& spec) {
  SpinField f(grid);
  switch (spec.kind) {
    case GroundStateKind::Uniform: {
      if (!(spec.uniform_density_um2 > 0.0))
        throw std::invalid_argument("ground_state: uniform density must be > 0");
      const cplx amp(std::sqrt(spec.uniform_density_um2), 0.0);
      for (cplx& v : f.zero) v = amp;
      return f;
    }
    case GroundStateKind::ThomasFermi: {
      if (!(spec.atom_number > 0.0))
        throw std::invalid_argument("ground_state: atom_number must be > 0");
      f.zero = thomas_fermi_profile(grid, cpl, trap, spec.atom_number);
      return f;
    }
    case GroundStateKind::ImaginaryTime: {
      if (!(spec.atom_number > 0.0))
        throw std::invalid_argument("ground_state: atom_number must be > 0");
      std::vector<cplx> psi = thomas_fermi_profile(grid, cpl, trap, spec.atom_number);
      fft::Fft2d fft(grid.nx, grid.nz);

      // half-step kinetic decay factors
      std::vector<double> kin_half(grid.size());
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double kx = grid.kx_um_inv(ix);
        for (int iz = 0; iz < grid.nz; ++iz) {
          const double kz = grid.kz_um_inv(iz);
          const double eps = cpl.kinetic_coeff * (kx * kx + kz * kz);
          kin_half[grid.idx(ix, iz)] = std::exp(
              -0.5 * constants::rad_per_hhz_ms * eps * spec.dtau_ms);
        }
      }

      double e_prev = scalar_energy(grid, cpl, trap, psi, fft);
      for (int iter = 0; iter < spec.max_iters; ++iter) {
        fft.forward(psi);
        for (size_t i = 0; i < psi.size(); ++i) psi[i] *= kin_half[i];
        fft.backward(psi);
        for (int ix = 0; ix < grid.nx; ++ix)
          for (int iz = 0; iz < grid.nz; ++iz) {
            const size_t i = grid.idx(ix, iz);
            const double loc = trap.potential_hhz(grid.x_um(ix), grid.z_um(iz)) +
                               cpl.c0_hhz_um2 * std::norm(psi[i]);
            psi[i] *= std::exp(-constants::rad_per_hhz_ms * loc * spec.dtau_ms);
          }
        fft.forward(psi);
        for (size_t i = 0; i < psi.size(); ++i) psi[i] *= kin_half[i];
        fft.backward(psi);
        normalize_to(psi, grid, spec.atom_number);

        const double e = scalar_energy(grid, cpl, trap, psi, fft);
        const double rel = std::abs(e - e_prev) / std::max(std::abs(e), 1e-300);
        e_prev = e;
        if (rel < spec.energy_tol) {
          f.zero = std::move(psi);
          return f;
        }
      }
      throw std::runtime_error("ground_state: imaginary time did not converge");
    }
  }
  throw std::logic_error("ground_state: unknown kind");
}

namespace {

void add_kspace_noise(SpinField& f, const SeedSpec& spec,
                      const model::Couplings& cpl) {
  const Grid2D& g = f.grid;
  const double area = g.area_um2();
  const size_t n = g.size();
  const size_t n_modes = n;
  fft::Fft2d fft(g.nx, g.nz);

  std::vector<cplx> buf_p(n), buf_m(n);

  if (spec.mode == SeedMode::Vacuum && spec.basis == SeedBasis::Bogoliubov) {
    // Sample the two transverse polarizations in the Bogoliubov basis and
    // rotate into the +/- sublevels: psi_± = (phi_x ∓ i phi_y)/sqrt(2).
    std::vector<cplx> phi_x(n), phi_y(n);
    const double amp2 = 0.5 * spec.scale;
    for (int ix = 0; ix < g.nx; ++ix) {
      const int fx = Grid2D::freq_index(ix, g.nx);
      for (int iz = 0; iz < g.nz; ++iz) {
        const int fz = Grid2D::freq_index(iz, g.nz);
        const size_t i = g.idx(ix, iz);
        const double k = std::hypot(g.kx_um_inv(ix), g.kz_um_inv(iz));
        const BogoliubovMode m =
            bogoliubov_uv(k, spec.q_at_seed_hhz, cpl.q0_hhz, cpl.kinetic_coeff);
        // conjugate-partner mode -k
        const int mix = fx == -g.nx / 2 ? ix : (g.nx - ix) % g.nx;
        const int miz = fz == -g.nz / 2 ? iz : (g.nz - iz) % g.nz;
        const size_t im = g.idx(mix, miz);
        const uint64_t id = rng::mode_id(fx, fz);
        const uint64_t id_m = rng::mode_id(Grid2D::freq_index(mix, g.nx),
                                           Grid2D::freq_index(miz, g.nz));
        (void)im;
        const cplx bx = std::sqrt(amp2) *
                        rng::complex_gaussian(spec.rng_seed, id, rng::Stream::VacuumPlus);
        const cplx by = std::sqrt(amp2) *
                        rng::complex_gaussian(spec.rng_seed, id, rng::Stream::VacuumMinus);
        const cplx bx_m = std::sqrt(amp2) *
                          rng::complex_gaussian(spec.rng_seed, id_m, rng::Stream::VacuumPlus);
        const cplx by_m = std::sqrt(amp2) *
                          rng::complex_gaussian(spec.rng_seed, id_m, rng::Stream::VacuumMinus);
        phi_x[i] = m.u * bx - m.v * std::conj(bx_m);
        phi_y[i] = m.u * by - m.v * std::conj(by_m);
      }
    }
    const cplx img(0.0, 1.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double scale_a = 1.0 / std::sqrt(area);
    for (size_t i = 0; i < n; ++i) {
      buf_p[i] = inv_sqrt2 * (phi_x[i] - img * phi_y[i]) * scale_a;
      buf_m[i] = inv_sqrt2 * (phi_x[i] + img * phi_y[i]) * scale_a;
    }
  } else if (spec.mode == SeedMode::Vacuum) {
    const double amp = std::sqrt(0.5 * spec.scale / area);
    for (int ix = 0; ix < g.nx; ++ix) {
      const int fx = Grid2D::freq_index(ix, g.nx);
      for (int iz = 0; iz < g.nz; ++iz) {
        const int fz = Grid2D::freq_index(iz, g.nz);
        const size_t i = g.idx(ix, iz);
        const uint64_t id = rng::mode_id(fx, fz);
        buf_p[i] = amp * rng::complex_gaussian(spec.rng_seed, id,
                                               rng::Stream::VacuumPlus);
        buf_m[i] = amp * rng::complex_gaussian(spec.rng_seed, id,
                                               rng::Stream::VacuumMinus);
      }
    }
  } else { // Thermal
    if (spec.thermal_population < 0.0)
      throw std::invalid_argument("apply_seed: thermal population must be >= 0");
    if (spec.thermal_population == 0.0) return;
    const double amp =
        std::sqrt(spec.thermal_population / (static_cast<double>(n_modes) * area));
    for (int ix = 0; ix < g.nx; ++ix) {
      const int fx = Grid2D::freq_index(ix, g.nx);
      for (int iz = 0; iz < g.nz; ++iz) {
        const int fz = Grid2D::freq_index(iz, g.nz);
        const size_t i = g.idx(ix, iz);
        const uint64_t id = rng::mode_id(fx, fz);
        const double ph_p = 2.0 * constants::pi *
                            rng::uniform(spec.rng_seed, id, rng::Stream::ThermalPlus);
        const double ph_m = 2.0 * constants::pi *
                            rng::uniform(spec.rng_seed, id, rng::Stream::ThermalMinus);
        buf_p[i] = amp * cplx(std::cos(ph_p), std::sin(ph_p));
        buf_m[i] = amp * cplx(std::cos(ph_m), std::sin(ph_m));
      }
    }
  }

  fft.backward_unnormalized(buf_p);
  fft.backward_unnormalized(buf_m);
  for (size_t i = 0; i < n; ++i) {
    f.plus[i] += buf_p[i];
    f.minus[i] += buf_m[i];
  }
}

void add_single_mode(SpinField& f, const SeedSpec& spec) {
  if (spec.amp_single < 0.0)
    throw std::invalid_argument("apply_seed: single-mode amplitude must be >= 0");
  if (spec.amp_single == 0.0) return;
  const Grid2D& g = f.grid;
  // nearest representable mode along z
  const double dk = 2.0 * constants::pi / g.length_z_um();
  int fz = static_cast<int>(std::lround(spec.k_single_um_inv / dk));
  fz = std::max(-g.nz / 2, std::min(g.nz / 2 - 1, fz));
  const double amp = std::sqrt(spec.amp_single / g.area_um2());
  const cplx partner = amp * std::polar(1.0, spec.pair_phase_rad);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double phase = 2.0 * constants::pi * fz * iz / g.nz;
      const cplx e(std::cos(phase), std::sin(phase));
      f.plus[g.idx(ix, iz)] += amp * e;
      f.minus[g.idx(ix, iz)] += partner * std::conj(e);
    }
}

} // namespace

void apply_seed(SpinField& f, const SeedSpec& spec, const model::Couplings& cpl) {
  if (spec.mode == SeedMode::None) return;
  require_empty_sidebands(f, "apply_seed");
  switch (spec.mode) {
    case SeedMode::Vacuum:
    case SeedMode::Thermal:
      add_kspace_noise(f, spec, cpl);
      break;
    case SeedMode::SingleMode:
      add_single_mode(f, spec);
      break;
    case SeedMode::None:
      break;
  }
}

} // namespace spinq::seed
