#include "spinquench/field.hpp"

#include <cmath>

namespace spinq::field {

ObservableMaps observables(const SpinField& f) {
  const size_t n = f.grid.size();
  ObservableMaps o;
  o.grid = f.grid;
  o.density.resize(n);
  o.fz.resize(n);
  o.f_perp.resize(n);
  o.n_xz.resize(n);
  o.n_yz.resize(n);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < n; ++i) {
    const cplx p = f.plus[i];
    const cplx z = f.zero[i];
    const cplx m = f.minus[i];
    const double np = std::norm(p);
    const double nz = std::norm(z);
    const double nm = std::norm(m);
    o.density[i] = np + nz + nm;
    o.fz[i] = np - nm;
    const cplx pz = std::conj(p) * z; // p* z
    const cplx zm = std::conj(z) * m; // z* m
    o.f_perp[i] = std::sqrt(2.0) * (pz + zm);
    o.n_xz[i] = inv_sqrt2 * (pz.real() - zm.real());
    // -[Im(z* p) + Im(z* m)] / sqrt(2); note Im(z* p) = -Im(p* z)
    o.n_yz[i] = inv_sqrt2 * (pz.imag() - zm.imag());
  }
  return o;
}

double atom_number(const SpinField& f) {
  double sum = 0.0;
  const size_t n = f.grid.size();
  for (size_t i = 0; i < n; ++i)
    sum += std::norm(f.plus[i]) + std::norm(f.zero[i]) + std::norm(f.minus[i]);
  return sum * f.grid.cell_area_um2();
}

std::array<double, 3> zeeman_population(const SpinField& f) {
  double np = 0.0, nz = 0.0, nm = 0.0;
  const size_t n = f.grid.size();
  for (size_t i = 0; i < n; ++i) {
    np += std::norm(f.plus[i]);
    nz += std::norm(f.zero[i]);
    nm += std::norm(f.minus[i]);
  }
  const double da = f.grid.cell_area_um2();
  return {np * da, nz * da, nm * da};
}

} // namespace spinq::field
