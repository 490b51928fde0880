#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nessxy/flux.hpp"
#include "nessxy/momentum.hpp"
#include "nessxy/scattering.hpp"

using namespace nessxy;
using Complex = std::complex<double>;

namespace {

// independent evaluation: composite Simpson over the unreduced spectral weight
double simpson_flux(double gamma, double bl, double br, int panels) {
  const auto co = flux::flux_coefficients(gamma);
  auto f = [&](double k) {
    const double s = std::sin(k);
    const double q = std::norm(scattering::spectral_denominator(gamma, k));
    const double p = 0.5 * co.b * s * s + co.c;
    const double w = q > 0.0 ? 1.0 - p / q : (co.b > 0.0 ? 0.5 : 1.0);
    return std::sin(2.0 * k) *
           momentum::delta_fermi_hyperbolic(bl, br, std::cos(k)) * w;
  };
  const double h = 0.5 * momentum::kPi / panels;
  double acc = f(0.0) + f(0.5 * momentum::kPi);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / (3.0 * momentum::kPi);
}

}  // namespace

TEST_SUITE_BEGIN("flux");

TEST_CASE("transmission coefficients at landmark couplings") {
  const auto c0 = flux::flux_coefficients(0.0);
  CHECK(c0.a == 1.0);
  CHECK(c0.b == 0.0);
  CHECK(c0.c == 0.0);
  const auto c1 = flux::flux_coefficients(1.0);
  CHECK(c1.a == 0.0);
  CHECK(c1.b == 1.0);
  CHECK(c1.c == 0.5625);
  const auto c2 = flux::flux_coefficients(2.0);
  CHECK(c2.a == 9.0);
  CHECK(c2.b == 16.0);
  CHECK(c2.c == 0.0);
}

TEST_CASE("spectral weight: values, range, degenerate points") {
  CHECK(flux::bracket(0.0, 0.7) == 1.0);
  CHECK(flux::bracket(0.0, 0.0) == 1.0);
  CHECK(std::abs(flux::bracket(1.0, 1.0) - 0.32) <= 1e-15);
  CHECK(std::abs(flux::bracket(1.0, -1.0) - 0.32) <= 1e-15);
  // |gamma| = 2 at the band edge: continuous extension
  CHECK(flux::bracket(2.0, 0.0) == 0.5);
  CHECK(std::abs(flux::bracket(2.0, 1e-8) - 0.5) <= 1e-8);
  for (double gamma : {0.5, 1.0, 2.0, 3.0})
    for (double s = 0.05; s <= 1.0; s += 0.05) {
      const double w = flux::bracket(gamma, s);
      CHECK(w >= 0.0);
      CHECK(w < 1.0);  // strictly lossy once the bond is perturbed
    }
}

TEST_CASE("frozen flux values") {
  CHECK(flux::heat_flux(0.0, 1.0, 2.0).j ==
        doctest::Approx(0.038934212413960931).epsilon(1e-12));
  CHECK(flux::heat_flux(1.0, 1.0, 2.0).j ==
        doctest::Approx(0.0076341982564369706).epsilon(1e-12));
  CHECK(flux::heat_flux(2.0, 1.0, 2.0).j ==
        doctest::Approx(0.023068047397652450).epsilon(1e-12));
  CHECK(flux::heat_flux(0.5, 0.5, 3.0).j ==
        doctest::Approx(0.045953184715066313).epsilon(1e-12));
  CHECK(flux::flux_lower_bound(1.0, 1.0, 2.0) ==
        doctest::Approx(0.0039727853014901527).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature agrees with a fixed composite rule") {
  for (double gamma : {0.0, 1.0, 2.0, 3.3}) {
    const double want = simpson_flux(gamma, 1.0, 2.0, 1 << 14);
    const auto got = flux::heat_flux(gamma, 1.0, 2.0, 1e-12);
    REQUIRE(got.converged);
    CHECK(std::abs(got.j - want) <= 1e-10);
  }
}

TEST_CASE("flux is even in the coupling, field by field") {
  for (double gamma : {0.37, 1.2, 2.0, 3.9}) {
    const auto plus = flux::heat_flux(gamma, 1.0, 2.0);
    const auto minus = flux::heat_flux(-gamma, 1.0, 2.0);
    CHECK(plus.j == minus.j);
    CHECK(plus.sigma == minus.sigma);
    CHECK(plus.lower_bound == minus.lower_bound);
    CHECK(plus.quad_error == minus.quad_error);
  }
}

TEST_CASE("perturbing the bond always reduces the flux") {
  const double j0 = flux::heat_flux(0.0, 1.0, 2.0).j;
  for (double gamma : {0.4, 1.0, 2.0, 3.5}) {
    const double j = flux::heat_flux(gamma, 1.0, 2.0).j;
    CHECK(j > 0.0);
    CHECK(j < j0);
  }
}

TEST_CASE("bounds sandwich the flux") {
  for (double gamma : {0.0, 0.6, 1.0, 2.0, 2.8, 4.0}) {
    const auto r = flux::heat_flux(gamma, 0.7, 2.4);
    CHECK(r.lower_bound > 0.0);
    CHECK(r.j >= r.lower_bound);
    CHECK(r.j <= r.upper_bound);
    CHECK(r.upper_bound == 0.5);
    CHECK(flux::entropy_production(r) == r.sigma);
    CHECK(r.sigma > 0.0);
    CHECK(r.sigma <= 0.5);
  }
}

TEST_CASE("lower bound: small-gap asymptotics and branch continuity") {
  // tiny temperature gap: leading order in the gap
  const double bl = 1.0, brs = 1.0 + 2e-6;
  const double d = 0.5 * (brs - bl);
  const double e0 = std::cosh(d) + std::cosh(0.5 * (brs + bl));
  const auto co = flux::flux_coefficients(1.0);
  const double leading =
      2.0 * co.b * (d / (15.0 * momentum::kPi)) / ((co.a + co.b + co.c) * e0);
  CHECK(std::abs(flux::flux_lower_bound(1.0, bl, brs) - leading) <=
        1e-6 * leading);
  const double leading_free = 4.0 * (d / (6.0 * momentum::kPi)) / e0;
  CHECK(std::abs(flux::flux_lower_bound(0.0, bl, brs) - leading_free) <=
        1e-6 * leading_free);

  // just below the crossover the series still matches the closed form
  auto mp_closed = [](double t) {
    return ((3.0 + t * t) * std::sinh(t) - 3.0 * t * std::cosh(t)) /
           (momentum::kPi * t * t * t * t);
  };
  auto mf_closed = [](double t) {
    return (t * std::cosh(t) - std::sinh(t)) / (2.0 * momentum::kPi * t * t);
  };
  const double dc = 1.9999;  // series branch; closed form is safe here too
  const double e0c = 2.0 * std::cosh(dc);
  for (double gamma : {0.0, 1.3}) {
    const double got = flux::flux_lower_bound(gamma, 0.0, 2.0 * dc);
    double want;
    if (gamma == 0.0) {
      want = 4.0 * mf_closed(dc) / e0c;
    } else {
      const auto c2 = flux::flux_coefficients(gamma);
      want = 2.0 * c2.b * mp_closed(dc) / ((c2.a + c2.b + c2.c) * e0c);
    }
    CHECK(std::abs(got - want) <= 1e-11 * want);
  }
}

TEST_CASE("equilibrium carries no flux") {
  const auto r = flux::heat_flux(0.7, 1.5, 1.5);
  CHECK(r.j == 0.0);
  CHECK(r.sigma == 0.0);
  CHECK(r.lower_bound == 0.0);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS((void)flux::heat_flux(1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)flux::heat_flux(1.0, -0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)flux::flux_lower_bound(1.0, 2.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("coupling sweep is deterministic and palindromic") {
  // mirror-exact grid, so palindromic rows can be required bitwise
  std::vector<double> gammas(41);
  for (int i = 0; i <= 20; ++i) {
    gammas[i] = -4.0 + 0.2 * i;
    gammas[40 - i] = -gammas[i];
  }
  const auto serial = flux::sweep(gammas, 1.0, 2.0, 1e-10, 1);
  const auto parallel = flux::sweep(gammas, 1.0, 2.0, 1e-10, 3);
  REQUIRE(serial.size() == gammas.size());
  REQUIRE(parallel.size() == gammas.size());
  for (size_t i = 0; i < gammas.size(); ++i) {
    CHECK(serial[i].gamma == gammas[i]);
    CHECK(serial[i].j == parallel[i].j);
    CHECK(serial[i].sigma == parallel[i].sigma);
    CHECK(serial[i].lower_bound == parallel[i].lower_bound);
    CHECK(serial[i].quad_error == parallel[i].quad_error);
    // mirror pair carries the identical row
    const size_t m = gammas.size() - 1 - i;
    CHECK(serial[i].j == serial[m].j);
  }
}

TEST_CASE("steady-state two-point function: tracial base cases") {
  // free chain, equal temperatures: every site carries occupation 1/2
  flux::DoubledCombo p0{{0, false, Complex(1.0, 0.0)}};
  flux::DoubledCombo h0{{0, true, Complex(1.0, 0.0)}};
  const auto pp = flux::ness_ac_two_point(p0, p0, 0.0, 0, 1.3, 1.3);
  const auto hh = flux::ness_ac_two_point(h0, h0, 0.0, 0, 1.3, 1.3);
  REQUIRE(pp.converged);
  REQUIRE(hh.converged);
  CHECK(std::abs(pp.value - 0.5) <= 1e-8);
  CHECK(std::abs(hh.value - 0.5) <= 1e-8);
}

TEST_CASE("steady-state two-point function: sesquilinearity and symmetry") {
  const double gamma = 0.9, bl = 1.0, br = 2.0;
  flux::DoubledCombo f{{-3, false, Complex(1.0, 0.0)}};
  flux::DoubledCombo g{{-1, false, Complex(1.0, 0.0)}};
  flux::DoubledCombo h{{2, true, Complex(1.0, 0.0)}};

  const auto fg = flux::ness_ac_two_point(f, g, gamma, 0, bl, br);
  const auto gf = flux::ness_ac_two_point(g, f, gamma, 0, bl, br);
  REQUIRE(fg.converged);
  CHECK(std::abs(fg.value - std::conj(gf.value)) <= 1e-9);

  const Complex z(0.0, 2.0);
  flux::DoubledCombo gh{{-1, false, Complex(1.0, 0.0)}, {2, true, z}};
  const auto lin = flux::ness_ac_two_point(f, gh, gamma, 0, bl, br);
  const auto fh = flux::ness_ac_two_point(f, h, gamma, 0, bl, br);
  CHECK(std::abs(lin.value - (fg.value + z * fh.value)) <= 1e-9);
}

TEST_CASE("boundary correlation reconstructs the heat flux") {
  const double want0 = flux::heat_flux(0.0, 1.0, 2.0, 1e-12).j;
  CHECK(std::abs(flux::flux_from_two_point(0.0, 0, 1, 1.0, 2.0, 1e-11) -
                 want0) <= 1e-9);

  const double want = flux::heat_flux(1.3, 1.0, 2.0, 1e-12).j;
  CHECK(std::abs(flux::flux_from_two_point(1.3, 0, 2, 1.0, 2.0, 1e-11) -
                 want) <= 1e-8);
}

TEST_SUITE_END();
