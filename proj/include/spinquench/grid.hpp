#pragma once

#include <cstddef>
#include <stdexcept>

#include "spinquench/constants.hpp"

namespace spinq::field {

// 2D periodic grid. nx, nz must be powers of two (spectral transforms).
// Storage is row-major with x the slow index: idx = ix * nz + iz.
struct Grid2D {
  int nx = 0;
  int nz = 0;
  double dx_um = 0.0;
  double dz_um = 0.0;

  Grid2D() = default;
  Grid2D(int nx_, int nz_, double dx_, double dz_)
      : nx(nx_), nz(nz_), dx_um(dx_), dz_um(dz_) {
    if (!is_pow2(nx) || !is_pow2(nz))
      throw std::invalid_argument("Grid2D: nx, nz must be powers of two");
    if (!(dx_um > 0.0) || !(dz_um > 0.0))
      throw std::invalid_argument("Grid2D: dx, dz must be > 0");
  }

  static bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

  size_t size() const { return static_cast<size_t>(nx) * nz; }
  size_t idx(int ix, int iz) const { return static_cast<size_t>(ix) * nz + iz; }
  double cell_area_um2() const { return dx_um * dz_um; }
  double area_um2() const { return size() * cell_area_um2(); }
  double length_x_um() const { return nx * dx_um; }
  double length_z_um() const { return nz * dz_um; }

  // Position of grid point relative to the box center.
  double x_um(int ix) const { return (ix - nx / 2) * dx_um; }
  double z_um(int iz) const { return (iz - nz / 2) * dz_um; }

  // Signed integer frequency for FFT bin i (standard wrap-around order).
  static int freq_index(int i, int n) { return i < n / 2 ? i : i - n; }

  double kx_um_inv(int ix) const {
    return 2.0 * constants::pi * freq_index(ix, nx) / length_x_um();
  }
  double kz_um_inv(int iz) const {
    return 2.0 * constants::pi * freq_index(iz, nz) / length_z_um();
  }
};

} // namespace spinq::field
