#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include "spinquench/constants.hpp"
#include "spinquench/field.hpp"
#include "spinquench/rng.hpp"

using namespace spinq;
using field::cplx;

namespace {

// Independent dense-matrix oracle: spin-1 matrices applied literally.
struct SpinOracle {
  using Mat = std::array<std::array<cplx, 3>, 3>;
  Mat fx, fy, fz;

  SpinOracle() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);
    fx = Mat{{{cplx(0), s, cplx(0)}, {s, cplx(0), s}, {cplx(0), s, cplx(0)}}};
    fy = Mat{{{cplx(0), -I * s, cplx(0)},
              {I * s, cplx(0), -I * s},
              {cplx(0), I * s, cplx(0)}}};
    fz = Mat{{{cplx(1), cplx(0), cplx(0)},
              {cplx(0), cplx(0), cplx(0)},
              {cplx(0), cplx(0), cplx(-1)}}};
  }

  static Mat mul(const Mat& a, const Mat& b) {
    Mat r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        cplx s(0.0);
        for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
        r[i][j] = s;
      }
    return r;
  }

  static cplx expect(const Mat& m, const std::array<cplx, 3>& psi) {
    cplx s(0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += std::conj(psi[i]) * m[i][j] * psi[j];
    return s;
  }

  static Mat sym(const Mat& a, const Mat& b) {
    Mat r = mul(a, b);
    const Mat ba = mul(b, a);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i][j] = 0.5 * (r[i][j] + ba[i][j]);
    return r;
  }
};

cplx random_cplx(uint64_t seed, uint64_t id) {
  return rng::complex_gaussian(seed, id, rng::Stream::Scratch);
}

field::SpinField random_field(const field::Grid2D& g, uint64_t seed) {
  field::SpinField f(g);
  for (size_t i = 0; i < g.size(); ++i) {
    f.plus[i] = random_cplx(seed, 3 * i);
    f.zero[i] = random_cplx(seed, 3 * i + 1);
    f.minus[i] = random_cplx(seed, 3 * i + 2);
  }
  return f;
}

} // namespace

TEST_CASE("observables: paramagnetic and coherent limits") {
  field::Grid2D g(4, 4, 0.5, 0.5);
  field::SpinField f(g);

  SUBCASE("pure m=0 has no spin") {
    for (auto& v : f.zero) v = cplx(2.0, 1.0);
    const auto o = field::observables(f);
    for (size_t i = 0; i < g.size(); ++i) {
      CHECK(o.fz[i] == 0.0);
      CHECK(std::abs(o.f_perp[i]) == 0.0);
      CHECK(o.density[i] == doctest::Approx(5.0).epsilon(1e-14));
    }
  }

  SUBCASE("maximal transverse coherent state saturates |F_perp| = n") {
    const cplx a(0.7, -0.3);
    for (size_t i = 0; i < g.size(); ++i) {
      f.zero[i] = a;
      f.plus[i] = a / std::sqrt(2.0);
      f.minus[i] = a / std::sqrt(2.0);
    }
    const auto o = field::observables(f);
    for (size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(o.f_perp[i]) == doctest::Approx(o.density[i]).epsilon(1e-13));
      CHECK(o.fz[i] == doctest::Approx(0.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("observables: dense 3x3 matrix-element oracle on random fields") {
  const SpinOracle orc;
  field::Grid2D g(2, 2, 1.0, 1.0);
  for (uint64_t seed = 11; seed < 14; ++seed) {
    const auto f = random_field(g, seed);
    const auto o = field::observables(f);
    const auto nxz = SpinOracle::sym(orc.fx, orc.fz);
    const auto nyz = SpinOracle::sym(orc.fy, orc.fz);
    for (size_t i = 0; i < g.size(); ++i) {
      const std::array<cplx, 3> psi{f.plus[i], f.zero[i], f.minus[i]};
      const double ex = SpinOracle::expect(orc.fx, psi).real();
      const double ey = SpinOracle::expect(orc.fy, psi).real();
      const double ez = SpinOracle::expect(orc.fz, psi).real();
      CHECK(o.f_perp[i].real() == doctest::Approx(ex).epsilon(1e-12));
      CHECK(o.f_perp[i].imag() == doctest::Approx(ey).epsilon(1e-12));
      CHECK(o.fz[i] == doctest::Approx(ez).epsilon(1e-12));
      CHECK(o.n_xz[i] ==
            doctest::Approx(SpinOracle::expect(nxz, psi).real()).epsilon(1e-12));
      CHECK(o.n_yz[i] ==
            doctest::Approx(SpinOracle::expect(nyz, psi).real()).epsilon(1e-12));
    }
  }
}

TEST_CASE("observables: gauge and rotation covariance, spin-1 bound") {
  field::Grid2D g(8, 8, 0.7, 0.7);
  const auto f = random_field(g, 42);
  const auto o = field::observables(f);

  SUBCASE("global phase leaves every map unchanged") {
    auto f2 = f;
    const cplx phase = std::polar(1.0, 1.2345);
    for (auto* comp : f2.components())
      for (auto& v : *comp) v *= phase;
    const auto o2 = field::observables(f2);
    for (size_t i = 0; i < g.size(); ++i) {
      CHECK(o2.density[i] == doctest::Approx(o.density[i]).epsilon(1e-13));
      CHECK(o2.fz[i] == doctest::Approx(o.fz[i]).epsilon(1e-12));
      CHECK(std::abs(o2.f_perp[i] - o.f_perp[i]) <= 1e-12 * (1.0 + std::abs(o.f_perp[i])));
    }
  }

  SUBCASE("rotation about z rotates F_perp rigidly") {
    const double phi = 0.8;
    auto f2 = f;
    const cplx em = std::polar(1.0, -phi), ep = std::polar(1.0, +phi);
    for (auto& v : f2.plus) v *= em;
    for (auto& v : f2.minus) v *= ep;
    const auto o2 = field::observables(f2);
    const cplx rot = std::polar(1.0, +phi);
    for (size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(o2.f_perp[i] - rot * o.f_perp[i]) <=
            1e-12 * (1.0 + std::abs(o.f_perp[i])));
      CHECK(o2.fz[i] == doctest::Approx(o.fz[i]).epsilon(1e-12));
      CHECK(o2.density[i] == doctest::Approx(o.density[i]).epsilon(1e-13));
    }
  }

  SUBCASE("pointwise spin-1 bound |F|^2 <= n^2") {
    for (size_t i = 0; i < g.size(); ++i) {
      const double f2 = o.fz[i] * o.fz[i] + std::norm(o.f_perp[i]);
      CHECK(f2 <= o.density[i] * o.density[i] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("atom_number: quadrature vs closed-form Gaussian") {
  // psi_0 = A exp(-x^2/2sx^2 - z^2/2sz^2): N = A^2 pi sx sz (2D Gaussian)
  field::Grid2D g(64, 64, 0.25, 0.25);
  field::SpinField f(g);
  const double amp = 3.0, sx = 1.3, sz = 2.1;
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double x = g.x_um(ix), z = g.z_um(iz);
      f.zero[g.idx(ix, iz)] =
          amp * std::exp(-x * x / (2 * sx * sx) - z * z / (2 * sz * sz));
    }
  const double closed_form = amp * amp * constants::pi * sx * sz;
  CHECK(field::atom_number(f) == doctest::Approx(closed_form).epsilon(1e-6));

  SUBCASE("doubling amplitudes quadruples the number") {
    auto f2 = f;
    for (auto& v : f2.zero) v *= 2.0;
    CHECK(field::atom_number(f2) ==
          doctest::Approx(4.0 * field::atom_number(f)).epsilon(1e-13));
  }

  SUBCASE("zero field has zero atoms") {
    field::SpinField fz(g);
    CHECK(field::atom_number(fz) == 0.0);
  }
}

TEST_CASE("zeeman_population: partition of the total") {
  field::Grid2D g(4, 8, 0.5, 1.0);
  auto f = random_field(g, 7);
  const auto pops = field::zeeman_population(f);
  CHECK(pops[0] + pops[1] + pops[2] ==
        doctest::Approx(field::atom_number(f)).epsilon(1e-13));

  field::SpinField pure(g);
  for (auto& v : pure.zero) v = cplx(1.5, 0.0);
  const auto p0 = field::zeeman_population(pure);
  CHECK(p0[0] == 0.0);
  CHECK(p0[2] == 0.0);
  CHECK(p0[1] == doctest::Approx(field::atom_number(pure)).epsilon(1e-14));
}
