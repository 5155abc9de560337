#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spinquench/constants.hpp"
#include "spinquench/spectrum.hpp"

using namespace spinq;
namespace c = spinq::constants;

namespace {
const double kCoeff = c::kinetic_coeff_um2_hz(c::rb87_mass_si);
const double kQ0 = 15.0;

// brute-force argmax of the growth rate over a dense k grid
double brute_force_kstar(double q, double q0, double kmax, int n) {
  double best_k = 0.0, best_rate = -1.0;
  for (int i = 0; i < n; ++i) {
    const double k = kmax * i / (n - 1.0);
    const double r = spectrum::growth_rate_per_s(k, q, q0, kCoeff);
    if (r > best_rate) {
      best_rate = r;
      best_k = k;
    }
  }
  return best_k;
}
} // namespace

TEST_CASE("dispersion_sq: anchor points") {
  // gap closes at the critical point
  CHECK(spectrum::dispersion_sq(0.0, kQ0, kQ0, kCoeff) == 0.0);
  // most negative value at eps_k = q0/2 for q = 0: -q0^2/4
  const double kstar = std::sqrt(0.5 * kQ0 / kCoeff);
  CHECK(spectrum::dispersion_sq(kstar, 0.0, kQ0, kCoeff) ==
        doctest::Approx(-kQ0 * kQ0 / 4.0).epsilon(1e-12));
  // stable above the transition: k=0, q=2q0 -> 2 q0^2
  CHECK(spectrum::dispersion_sq(0.0, 2.0 * kQ0, kQ0, kCoeff) ==
        doctest::Approx(2.0 * kQ0 * kQ0).epsilon(1e-14));
  CHECK_THROWS_AS(spectrum::dispersion_sq(0.0, 0.0, -1.0, kCoeff),
                  std::invalid_argument);
}

TEST_CASE("growth_rate: maximum is q0/hbar = 2 pi q0") {
  const double kstar = std::sqrt(0.5 * kQ0 / kCoeff);
  const double rate = spectrum::growth_rate_per_s(kstar, 0.0, kQ0, kCoeff);
  CHECK(rate == doctest::Approx(2.0 * c::pi * kQ0).epsilon(1e-12));
  CHECK(rate == doctest::Approx(94.248).epsilon(1e-4));
  // gapped modes do not grow
  CHECK(spectrum::growth_rate_per_s(10.0, 0.0, kQ0, kCoeff) == 0.0);
  // q = q0/2, k = 0: E_s^2 = -q0^2/4, same maximal rate
  CHECK(spectrum::growth_rate_per_s(0.0, 0.5 * kQ0, kQ0, kCoeff) ==
        doctest::Approx(2.0 * c::pi * kQ0).epsilon(1e-12));
}

TEST_CASE("classify: boundaries follow the closed/open intervals") {
  CHECK(spectrum::classify(16.0, kQ0) == spectrum::QuenchClass::Stable);
  CHECK(spectrum::classify(15.0, kQ0) == spectrum::QuenchClass::Stable);
  CHECK(spectrum::classify(10.0, kQ0) == spectrum::QuenchClass::Shallow);
  CHECK(spectrum::classify(7.5, kQ0) == spectrum::QuenchClass::Shallow);
  CHECK(spectrum::classify(2.0, kQ0) == spectrum::QuenchClass::Deep);
  CHECK(spectrum::classify(-2.0, kQ0) == spectrum::QuenchClass::Deep);
}

TEST_CASE("dominant_wavevector: analytic vs brute force") {
  // frozen oracle values (dense scan cross-checked against eps* = q0/2 - q)
  const double k0 = spectrum::dominant_wavevector(0.0, kQ0, kCoeff);
  CHECK(k0 == doctest::Approx(0.359).epsilon(2e-3));
  CHECK(k0 == doctest::Approx(brute_force_kstar(0.0, kQ0, 2.0, 200001)).epsilon(1e-4));

  const double k2 = spectrum::dominant_wavevector(2.0, kQ0, kCoeff);
  CHECK(k2 == doctest::Approx(0.3075).epsilon(2e-3));
  CHECK(k2 == doctest::Approx(brute_force_kstar(2.0, kQ0, 2.0, 200001)).epsilon(1e-4));

  // shallow quench: fastest growth at zero wavevector
  CHECK(spectrum::dominant_wavevector(10.0, kQ0, kCoeff) == 0.0);
  // continuity at the deep/shallow boundary
  CHECK(spectrum::dominant_wavevector(0.5 * kQ0 - 1e-9, kQ0, kCoeff) ==
        doctest::Approx(0.0).epsilon(1e-3));
  CHECK_THROWS_AS(spectrum::dominant_wavevector(16.0, kQ0, kCoeff),
                  std::domain_error);
}

TEST_CASE("predicted_domain_size: pi/k* and monotonic trend") {
  CHECK(spectrum::predicted_domain_size_um(0.0, kQ0, kCoeff) ==
        doctest::Approx(8.75).epsilon(2e-3));
  CHECK(spectrum::predicted_domain_size_um(2.0, kQ0, kCoeff) ==
        doctest::Approx(10.2).epsilon(3e-3));
  CHECK(spectrum::predicted_domain_size_um(4.0, kQ0, kCoeff) >
        spectrum::predicted_domain_size_um(0.0, kQ0, kCoeff));
  CHECK_THROWS_AS(spectrum::predicted_domain_size_um(10.0, kQ0, kCoeff),
                  std::domain_error);
}

TEST_CASE("spectrum_table: consistency with point evaluations") {
  const auto t2 = spectrum::spectrum_table(2.0, kQ0, kCoeff, 1.0, 2);
  CHECK(t2.size() == 2);
  CHECK(t2[0].k_um_inv == 0.0);
  CHECK(t2[1].k_um_inv == 1.0);
  CHECK(t2[1].es_squared_hhz2 ==
        doctest::Approx(spectrum::dispersion_sq(1.0, 2.0, kQ0, kCoeff)).epsilon(1e-14));

  // marginal stability at q = q0: no growing entries except the zero at k=0
  const auto tm = spectrum::spectrum_table(kQ0, kQ0, kCoeff, 2.0, 512);
  for (const auto& p : tm) CHECK(p.growth_rate_per_s == 0.0);

  // table maximum within one grid spacing of the analytic k*
  const auto td = spectrum::spectrum_table(2.0, kQ0, kCoeff, 2.0, 4096);
  double best_k = 0.0, best_rate = -1.0;
  for (const auto& p : td)
    if (p.growth_rate_per_s > best_rate) {
      best_rate = p.growth_rate_per_s;
      best_k = p.k_um_inv;
    }
  CHECK(std::abs(best_k - spectrum::dominant_wavevector(2.0, kQ0, kCoeff)) <=
        2.0 / 4095.0 + 1e-12);
  CHECK_THROWS_AS(spectrum::spectrum_table(2.0, kQ0, kCoeff, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("maximal rate per branch: q0/hbar deep, 2 sqrt(q(q0-q))/hbar shallow") {
  for (double q : {0.0, 2.0, 5.0, 7.5}) {
    const double k = spectrum::dominant_wavevector(q, kQ0, kCoeff);
    CHECK(spectrum::growth_rate_per_s(k, q, kQ0, kCoeff) ==
          doctest::Approx(2.0 * c::pi * kQ0).epsilon(1e-12));
  }
  for (double q : {8.0, 10.0, 13.0}) { // shallow: fastest mode at k = 0
    const double expect = 4.0 * c::pi * std::sqrt(q * (kQ0 - q));
    CHECK(spectrum::growth_rate_per_s(0.0, q, kQ0, kCoeff) ==
          doctest::Approx(expect).epsilon(1e-12));
    double table_max = 0.0;
    for (const auto& p : spectrum::spectrum_table(q, kQ0, kCoeff, 2.0, 8192))
      table_max = std::max(table_max, p.growth_rate_per_s);
    CHECK(table_max == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("stability properties over the band") {
  // q >= q0: no negative dispersion anywhere
  for (double k = 0.0; k <= 3.0; k += 0.01)
    CHECK(spectrum::dispersion_sq(k, kQ0, kQ0, kCoeff) >= 0.0);

  // q < q0: unstable band is exactly {k : -q < eps_k < q0 - q}; locate the
  // band edges by bisection on the sign change and compare analytically.
  for (double q : {-2.0, 0.0, 2.0, 10.0}) {
    const double eps_hi = kQ0 - q;
    const double k_hi = std::sqrt(eps_hi / kCoeff);
    double lo = k_hi * 0.5, hi = k_hi * 1.5;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (spectrum::dispersion_sq(mid, q, kQ0, kCoeff) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(k_hi).epsilon(1e-10));

    if (q < 0.0) {
      // lower band edge at eps_k = -q
      const double k_lo = std::sqrt(-q / kCoeff);
      double a = 0.0, b = k_lo * 1.5;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (spectrum::dispersion_sq(mid, q, kQ0, kCoeff) >= 0.0)
          a = mid;
        else
          b = mid;
      }
      CHECK(0.5 * (a + b) == doctest::Approx(k_lo).epsilon(1e-10));
    }
  }
}
