#include "spinquench/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spinq::dynamics {

using field::cplx;
using field::Grid2D;
using field::SpinField;
namespace c = spinq::constants;

double QuenchProtocol::q_at(double t_ms) const {
  if (ramp_ms < 0.0 || hold_ms < 0.0)
    throw std::invalid_argument("QuenchProtocol: negative duration");
  if (t_ms >= ramp_ms || ramp_ms == 0.0) return q_final_hhz;
  const double s = std::max(0.0, t_ms / ramp_ms);
  if (shape == RampShape::LinearQ)
    return q_initial_hhz + (q_final_hhz - q_initial_hhz) * s;
  // LinearB: the static-field part above q_mu scales as B^2 with B linear in t
  const double qbi = q_initial_hhz - q_mu_hhz;
  const double qbf = q_final_hhz - q_mu_hhz;
  if (qbi < 0.0 || qbf < 0.0)
    throw std::invalid_argument(
        "QuenchProtocol: LinearB requires q - q_mu >= 0 at both ends");
  const double root = std::sqrt(qbi) * (1.0 - s) + std::sqrt(qbf) * s;
  return q_mu_hhz + root * root;
}

namespace {

// Eigen-decomposition of the real symmetric tridiagonal matrix
//   [[a, b, 0], [b, c, b], [0, b, e]]
// Eigenvalues by the trigonometric method; eigenvectors by row cross
// products with Gram-Schmidt cleanup, so Q is orthonormal to roundoff even
// at degeneracies (the b -> 0, a ~ e case is the common paramagnetic path).
struct Sym3Eig {
  double lam[3];
  double q[3][3]; // q[j] = j-th eigenvector
};

inline void cross3(const double u[3], const double v[3], double w[3]) {
  w[0] = u[1] * v[2] - u[2] * v[1];
  w[1] = u[2] * v[0] - u[0] * v[2];
  w[2] = u[0] * v[1] - u[1] * v[0];
}

inline double dot3(const double u[3], const double v[3]) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline double norm3(const double u[3]) { return std::sqrt(dot3(u, u)); }

Sym3Eig sym3_tridiag_eig(double a, double cdiag, double e, double b) {
  Sym3Eig out;
  const double tr3 = (a + cdiag + e) / 3.0;
  const double da = a - tr3, dc = cdiag - tr3, de = e - tr3;
  const double p2 = da * da + dc * dc + de * de + 4.0 * b * b;
  const double scale = std::sqrt(std::max(p2, 0.0) / 6.0);

  if (scale <= 0.0 ||
      scale < 1e-300 + 1e-15 * (std::abs(a) + std::abs(cdiag) + std::abs(e))) {
    out.lam[0] = out.lam[1] = out.lam[2] = tr3;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.q[i][j] = (i == j) ? 1.0 : 0.0;
    return out;
  }

  // det((A - tr3 I)/scale) / 2
  const double det = da * (dc * de - b * b) - b * b * de;
  double r = 0.5 * det / (scale * scale * scale);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  out.lam[0] = tr3 + 2.0 * scale * std::cos(phi);
  out.lam[2] = tr3 + 2.0 * scale * std::cos(phi + 2.0 * c::pi / 3.0);
  out.lam[1] = 3.0 * tr3 - out.lam[0] - out.lam[2];

  // eigenvector for a given eigenvalue from the two largest row cross products
  auto eigvec = [&](double lam, double v[3]) -> bool {
    const double r1[3] = {a - lam, b, 0.0};
    const double r2[3] = {b, cdiag - lam, b};
    const double r3[3] = {0.0, b, e - lam};
    double c12[3], c13[3], c23[3];
    cross3(r1, r2, c12);
    cross3(r1, r3, c13);
    cross3(r2, r3, c23);
    const double n12 = norm3(c12), n13 = norm3(c13), n23 = norm3(c23);
    const double* best = c12;
    double nbest = n12;
    if (n13 > nbest) { best = c13; nbest = n13; }
    if (n23 > nbest) { best = c23; nbest = n23; }
    if (nbest < 1e-12 * scale * scale) return false;
    const double inv = 1.0 / nbest;
    v[0] = best[0] * inv;
    v[1] = best[1] * inv;
    v[2] = best[2] * inv;
    return true;
  };

  double v0[3], v1[3];
  if (!eigvec(out.lam[0], v0)) { v0[0] = 1.0; v0[1] = 0.0; v0[2] = 0.0; }
  if (!eigvec(out.lam[1], v1)) {
    // pick the coordinate axis least aligned with v0
    int k = 0;
    if (std::abs(v0[1]) < std::abs(v0[k])) k = 1;
    if (std::abs(v0[2]) < std::abs(v0[k])) k = 2;
    v1[0] = v1[1] = v1[2] = 0.0;
    v1[k] = 1.0;
  }
  // Gram-Schmidt: orthonormal triple regardless of eigenvalue accuracy
  const double proj = dot3(v1, v0);
  for (int i = 0; i < 3; ++i) v1[i] -= proj * v0[i];
  double n1 = norm3(v1);
  if (n1 < 1e-8) {
    int k = 0;
    if (std::abs(v0[1]) < std::abs(v0[k])) k = 1;
    if (std::abs(v0[2]) < std::abs(v0[k])) k = 2;
    v1[0] = v1[1] = v1[2] = 0.0;
    v1[k] = 1.0;
    const double pr = dot3(v1, v0);
    for (int i = 0; i < 3; ++i) v1[i] -= pr * v0[i];
    n1 = norm3(v1);
  }
  for (int i = 0; i < 3; ++i) v1[i] /= n1;
  double v2[3];
  cross3(v0, v1, v2);

  for (int i = 0; i < 3; ++i) {
    out.q[0][i] = v0[i];
    out.q[1][i] = v1[i];
    out.q[2][i] = v2[i];
  }
  return out;
}

} // namespace

Stepper::Stepper(const Grid2D& grid, const model::Couplings& cpl,
                 const model::Trap& trap)
    : grid_(grid), cpl_(cpl), trap_(trap), fft_(grid.nx, grid.nz),
      eps_hhz_(grid.size()), potential_hhz_(grid.size()),
      kin_half_phase_(grid.size()) {
  for (int ix = 0; ix < grid_.nx; ++ix) {
    const double kx = grid_.kx_um_inv(ix);
    const double x = grid_.x_um(ix);
    for (int iz = 0; iz < grid_.nz; ++iz) {
      const double kz = grid_.kz_um_inv(iz);
      const size_t i = grid_.idx(ix, iz);
      eps_hhz_[i] = cpl_.kinetic_coeff * (kx * kx + kz * kz);
      potential_hhz_[i] = trap_.potential_hhz(x, grid_.z_um(iz));
    }
  }
}

void Stepper::freeze_density(const SpinField& f) {
  frozen_n_.resize(grid_.size());
  for (size_t i = 0; i < grid_.size(); ++i)
    frozen_n_[i] =
        std::norm(f.plus[i]) + std::norm(f.zero[i]) + std::norm(f.minus[i]);
}

double Stepper::dt_bound_ms() const {
  const double eps_max =
      *std::max_element(eps_hhz_.begin(), eps_hhz_.end());
  const double e = std::max(eps_max, 1e-300);
  const double q0 = std::max(cpl_.q0_hhz, 1e-300);
  const double bound_eps = 1.0e3 / (2.0 * c::pi * e);
  const double bound_q0 = 1.0e3 / (2.0 * c::pi * q0);
  return 0.1 * std::min(bound_eps, bound_q0);
}

void Stepper::refresh_kinetic_phases(double dt_ms, bool kinetic_on) {
  if (dt_ms == cached_dt_ms_ && kinetic_on == cached_kinetic_on_) return;
  for (size_t i = 0; i < grid_.size(); ++i) {
    const double phase =
        kinetic_on ? -0.5 * c::rad_per_hhz_ms * eps_hhz_[i] * dt_ms : 0.0;
    kin_half_phase_[i] = cplx(std::cos(phase), std::sin(phase));
  }
  cached_dt_ms_ = dt_ms;
  cached_kinetic_on_ = kinetic_on;
}

namespace {

// Exact unitary of the frozen local Hamiltonian applied to (p, z, m).
// Diagonal (dp, d0, dm), off-diagonal h on the (+,0) and (0,-) links.
inline void apply_local_unitary(cplx& p, cplx& z, cplx& m, double dp,
                                double d0, double dm, cplx h, double theta) {
  const double babs = std::abs(h);
  const double mag = std::abs(dp) + std::abs(d0) + std::abs(dm);
  if (babs <= 1e-300 + 1e-16 * mag) {
    p *= cplx(std::cos(-dp * theta), std::sin(-dp * theta));
    z *= cplx(std::cos(-d0 * theta), std::sin(-d0 * theta));
    m *= cplx(std::cos(-dm * theta), std::sin(-dm * theta));
    return;
  }

  // Phase-rotate so the off-diagonals are real: H' = D^H H D with
  // D = diag(w, 1, w*), w = h/|h|; then H' is real symmetric tridiagonal.
  const cplx w = h / babs;
  const cplx yp = std::conj(w) * p;
  const cplx y0 = z;
  const cplx ym = w * m;

  const Sym3Eig eig = sym3_tridiag_eig(dp, d0, dm, babs);
  cplx out[3] = {0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    const double* qv = eig.q[j];
    const cplx coef = qv[0] * yp + qv[1] * y0 + qv[2] * ym;
    const double ph = -eig.lam[j] * theta;
    const cplx rot = coef * cplx(std::cos(ph), std::sin(ph));
    out[0] += rot * qv[0];
    out[1] += rot * qv[1];
    out[2] += rot * qv[2];
  }
  p = w * out[0];
  z = out[1];
  m = std::conj(w) * out[2];
}

} // namespace

void Stepper::local_step(SpinField& f, double dt_ms, double q_hhz,
                         const TermFlags& terms) {
  const double theta = c::rad_per_hhz_ms * dt_ms;
  const double c0 = terms.c0_density ? cpl_.c0_hhz_um2 : 0.0;
  const double c2 = terms.c2_spin ? cpl_.c2_hhz_um2 : 0.0;
  const double q = terms.quadratic_zeeman ? q_hhz : 0.0;
  const bool trap_on = terms.trap && trap_.enabled;
  const bool use_frozen = !frozen_n_.empty();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  const size_t n = grid_.size();
  for (size_t i = 0; i < n; ++i) {
    cplx p = f.plus[i];
    cplx z = f.zero[i];
    cplx m = f.minus[i];

    // Density is conserved by the local flow; the spin fields are not, so
    // evaluate them at the substep midpoint (second-order consistency).
    const double np = std::norm(p), nz = std::norm(z), nm = std::norm(m);
    const double dens = use_frozen ? frozen_n_[i] : (np + nz + nm);
    const double base = (trap_on ? potential_hhz_[i] : 0.0) + c0 * dens;

    double fz = np - nm;
    cplx fperp = std::sqrt(2.0) * (std::conj(p) * z + std::conj(z) * m);

    cplx ph = p, zh = z, mh = m;
    apply_local_unitary(ph, zh, mh, base + q + c2 * fz, base,
                        base + q - c2 * fz, c2 * inv_sqrt2 * std::conj(fperp),
                        0.5 * theta);
    fz = std::norm(ph) - std::norm(mh);
    fperp = std::sqrt(2.0) * (std::conj(ph) * zh + std::conj(zh) * mh);

    apply_local_unitary(p, z, m, base + q + c2 * fz, base,
                        base + q - c2 * fz, c2 * inv_sqrt2 * std::conj(fperp),
                        theta);
    f.plus[i] = p;
    f.zero[i] = z;
    f.minus[i] = m;
  }
}

void Stepper::step(SpinField& f, double dt_ms, double q_now_hhz,
                   const TermFlags& terms) {
  refresh_kinetic_phases(dt_ms, terms.kinetic);
  if (terms.kinetic) {
    for (auto* comp : f.components()) {
      fft_.forward(*comp);
      for (size_t i = 0; i < comp->size(); ++i) (*comp)[i] *= kin_half_phase_[i];
      fft_.backward(*comp);
    }
  }
  local_step(f, dt_ms, q_now_hhz, terms);
  if (terms.kinetic) {
    for (auto* comp : f.components()) {
      fft_.forward(*comp);
      for (size_t i = 0; i < comp->size(); ++i) (*comp)[i] *= kin_half_phase_[i];
      fft_.backward(*comp);
    }
  }
}

namespace {

bool field_finite(const SpinField& f) {
  for (const auto* comp : f.components())
    for (const cplx& v : *comp)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

// G(0) over a centered region: sum |F_perp|^2 / sum n^2 (zero-lag correlation).
double region_g0(const SpinField& f, double wx_um, double wz_um) {
  const Grid2D& g = f.grid;
  int hx = wx_um > 0.0 ? std::min(g.nx / 2, static_cast<int>(std::lround(
                             0.5 * wx_um / g.dx_um))) : g.nx / 2;
  int hz = wz_um > 0.0 ? std::min(g.nz / 2, static_cast<int>(std::lround(
                             0.5 * wz_um / g.dz_um))) : g.nz / 2;
  hx = std::max(hx, 1);
  hz = std::max(hz, 1);
  double num = 0.0, den = 0.0;
  for (int ix = g.nx / 2 - hx; ix < g.nx / 2 + hx; ++ix)
    for (int iz = g.nz / 2 - hz; iz < g.nz / 2 + hz; ++iz) {
      const size_t i = g.idx(ix, iz);
      const cplx p = f.plus[i], z = f.zero[i], m = f.minus[i];
      const double dens = std::norm(p) + std::norm(z) + std::norm(m);
      const cplx fperp = std::sqrt(2.0) * (std::conj(p) * z + std::conj(z) * m);
      num += std::norm(fperp);
      den += dens * dens;
    }
  return den > 0.0 ? num / den : 0.0;
}

} // namespace

TrajectoryRecord Stepper::evolve(SpinField& f, const QuenchProtocol& protocol,
                                 const EvolutionConfig& cfg,
                                 const SnapshotCallback& on_snapshot) {
  if (!(cfg.dt_ms > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
  const double bound = dt_bound_ms();
  if (cfg.dt_ms > bound * (1.0 + 1e-12))
    throw std::invalid_argument("evolve: dt " + std::to_string(cfg.dt_ms) +
                                " ms exceeds the stability bound " +
                                std::to_string(bound) + " ms");
  if (!std::is_sorted(cfg.record_ms.begin(), cfg.record_ms.end()))
    throw std::invalid_argument("evolve: record times must be sorted ascending");

  const double duration = protocol.duration_ms();
  if (!cfg.record_ms.empty() &&
      cfg.record_ms.back() > duration + 0.5 * cfg.dt_ms)
    throw std::invalid_argument("evolve: record time beyond protocol duration");

  if (cfg.frozen_density && frozen_n_.empty()) freeze_density(f);
  if (!cfg.frozen_density) frozen_n_.clear();

  const long n_steps = std::lround(duration / cfg.dt_ms);
  std::vector<long> record_steps(cfg.record_ms.size());
  for (size_t i = 0; i < cfg.record_ms.size(); ++i)
    record_steps[i] =
        std::min(n_steps, std::lround(cfg.record_ms[i] / cfg.dt_ms));

  TrajectoryRecord rec;
  auto record_now = [&](double t_ms) {
    rec.times_ms.push_back(t_ms);
    rec.populations.push_back(field::zeeman_population(f));
    rec.g0.push_back(region_g0(f, cfg.g0_region_x_um, cfg.g0_region_z_um));
    if (cfg.store_snapshots) rec.snapshots.push_back(f);
    if (on_snapshot) on_snapshot(t_ms, f);
  };

  size_t next_rec = 0;
  while (next_rec < record_steps.size() && record_steps[next_rec] == 0) {
    record_now(0.0);
    ++next_rec;
  }

  for (long s = 0; s < n_steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * cfg.dt_ms;
    step(f, cfg.dt_ms, protocol.q_at(t_mid), cfg.terms);

    const bool due_check =
        cfg.nan_check_interval > 0 && (s + 1) % cfg.nan_check_interval == 0;
    const bool due_record =
        next_rec < record_steps.size() && record_steps[next_rec] == s + 1;
    if ((due_check || due_record || s + 1 == n_steps) && !field_finite(f))
      throw NumericalAbort("evolve: non-finite field at t = " +
                           std::to_string((s + 1) * cfg.dt_ms) + " ms");
    while (next_rec < record_steps.size() && record_steps[next_rec] == s + 1) {
      record_now((s + 1) * cfg.dt_ms);
      ++next_rec;
    }
  }
  return rec;
}

double Stepper::total_energy(const SpinField& f, double q_hhz,
                             const TermFlags& terms) const {
  const size_t n = grid_.size();
  double e_kin = 0.0;
  if (terms.kinetic) {
    std::vector<cplx> khat(n);
    const double norm = 1.0 / static_cast<double>(n);
    for (const auto* comp : f.components()) {
      khat = *comp;
      fft_.forward(khat);
      for (size_t i = 0; i < n; ++i) e_kin += eps_hhz_[i] * std::norm(khat[i]) * norm;
    }
  }

  const double c0 = terms.c0_density ? cpl_.c0_hhz_um2 : 0.0;
  const double c2 = terms.c2_spin ? cpl_.c2_hhz_um2 : 0.0;
  const double q = terms.quadratic_zeeman ? q_hhz : 0.0;
  const bool trap_on = terms.trap && trap_.enabled;

  double e_loc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const cplx p = f.plus[i], z = f.zero[i], m = f.minus[i];
    const double np = std::norm(p), nz = std::norm(z), nm = std::norm(m);
    const double dens = np + nz + nm;
    const double fz = np - nm;
    const cplx fperp = std::sqrt(2.0) * (std::conj(p) * z + std::conj(z) * m);
    e_loc += (trap_on ? potential_hhz_[i] : 0.0) * dens;
    e_loc += q * (np + nm);
    e_loc += 0.5 * c0 * dens * dens;
    e_loc += 0.5 * c2 * (fz * fz + std::norm(fperp));
  }
  return (e_kin + e_loc) * grid_.cell_area_um2();
}

} // namespace spinq::dynamics
