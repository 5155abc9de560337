#pragma once

#include <array>
#include <complex>
#include <vector>

#include "spinquench/grid.hpp"

namespace spinq::field {

using cplx = std::complex<double>;

// Three-component order parameter on a 2D grid. Components are 2D amplitudes
// in units of 1/um, so |psi|^2 is a column density in 1/um^2.
struct SpinField {
  Grid2D grid;
  std::vector<cplx> plus;
  std::vector<cplx> zero;
  std::vector<cplx> minus;

  SpinField() = default;
  explicit SpinField(const Grid2D& g)
      : grid(g), plus(g.size()), zero(g.size()), minus(g.size()) {}

  std::array<std::vector<cplx>*, 3> components() {
    return {&plus, &zero, &minus};
  }
  std::array<const std::vector<cplx>*, 3> components() const {
    return {&plus, &zero, &minus};
  }
};

// Pointwise spin-1 observables, all densities in 1/um^2.
//   density : n = |p|^2 + |z|^2 + |m|^2
//   fz      : |p|^2 - |m|^2
//   f_perp  : <Fx> + i <Fy> = sqrt(2) (p* z + z* m)
//   n_xz    : <(Fx Fz + Fz Fx)/2> = Re(p* z - z* m) / sqrt(2)
//   n_yz    : <(Fy Fz + Fz Fy)/2> = -Im(z* p + z* m) / sqrt(2)
// The quadrupole components use the symmetrized products of the spin-1
// matrices; they are the conjugate partners of Fy and Fx respectively.
struct ObservableMaps {
  Grid2D grid;
  std::vector<double> density;
  std::vector<double> fz;
  std::vector<cplx> f_perp;
  std::vector<double> n_xz;
  std::vector<double> n_yz;
};

ObservableMaps observables(const SpinField& f);

// Total atom number, quadrature sum of all components.
double atom_number(const SpinField& f);

// Per-component atom numbers (N+, N0, N-).
std::array<double, 3> zeeman_population(const SpinField& f);

} // namespace spinq::field
