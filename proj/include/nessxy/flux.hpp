#pragma once
// Closed-form steady-state heat flux of the perturbed chain, entropy
// production, analytic bounds, and the momentum-space two-point function of
// the steady state restricted to the scattering sector.

#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "nessxy/momentum.hpp"
#include "nessxy/quadrature.hpp"
#include "nessxy/scattering.hpp"

namespace nessxy::flux {

using Complex = std::complex<double>;

inline constexpr double kPi = momentum::kPi;
inline constexpr double kDefaultTol = 1e-10;

// ---- transmission polynomial -------------------------------------------------

// |D(k)|^2 sin^4 k = a s^4 + b s^2 + c in s = sin k.
struct BracketCoefficients {
  double a = 0.0, b = 0.0, c = 0.0;
};

inline BracketCoefficients flux_coefficients(double gamma) {
  const double g2 = gamma * gamma;
  BracketCoefficients co;
  co.a = (1.0 - g2) * (1.0 - g2);
  co.b = 0.5 * g2 * ((2.0 - g2) * (2.0 - g2) + g2);
  co.c = (g2 * g2 / 16.0) * (4.0 - g2) * (4.0 - g2);
  return co;
}

// The spectral weight 1 - P/Q reduced to (a s^4 + b s^2 / 2) / (a s^4 + b s^2 + c);
// degenerate points where the denominator vanishes take their continuous
// extension (1 for the free chain, 1/2 for |gamma| = 2 at the band edge).
inline double bracket(double gamma, double s) {
  const auto co = flux_coefficients(gamma);
  const double s2 = s * s;
  const double q = co.a * s2 * s2 + co.b * s2 + co.c;
  if (q == 0.0) return co.b > 0.0 ? 0.5 : 1.0;
  return (co.a * s2 * s2 + 0.5 * co.b * s2) / q;
}

// ---- heat flux -----------------------------------------------------------------

struct FluxResult {
  double gamma = 0.0;
  double beta_l = 0.0, beta_r = 0.0;
  double j = 0.0;
  double sigma = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.5;
  double quad_error = 0.0;
  bool converged = true;
};

namespace detail {

inline void require_betas(double beta_l, double beta_r) {
  if (beta_l < 0 || beta_r < 0)
    throw std::invalid_argument("inverse temperatures must be >= 0");
  if (beta_l > beta_r)
    throw std::invalid_argument("beta_l must not exceed beta_r");
}

// [(3 + d^2) sinh d - 3 d cosh d] / (pi d^4); even series below d = 2 to
// avoid the small-d cancellation.
inline double bound_moment_perturbed(double d) {
  if (d < 2.0) {
    double acc = 0.0;
    double f2m1 = 6.0;  // (2m+1)! at m = 1
    for (int m = 2; m <= 24; ++m) {
      f2m1 *= (2.0 * m) * (2.0 * m + 1.0);  // (2m+1)!
      const double f2m = f2m1 / (2.0 * m + 1.0);
      const double f2m_1 = f2m / (2.0 * m);
      const double g = 3.0 / f2m1 + 1.0 / f2m_1 - 3.0 / f2m;
      acc += g * std::pow(d, 2 * m - 3);
    }
    return acc / kPi;
  }
  return ((3.0 + d * d) * std::sinh(d) - 3.0 * d * std::cosh(d)) / (kPi * d * d * d * d);
}

// [d cosh d - sinh d] / (2 pi d^2); same series treatment.
inline double bound_moment_free(double d) {
  if (d < 2.0) {
    double acc = 0.0;
    double f2m1 = 1.0;  // (2m+1)! at m = 0
    for (int m = 1; m <= 24; ++m) {
      f2m1 *= (2.0 * m) * (2.0 * m + 1.0);
      acc += (2.0 * m) / f2m1 * std::pow(d, 2 * m - 1);
    }
    return acc / (2.0 * kPi);
  }
  return (d * std::cosh(d) - std::sinh(d)) / (2.0 * kPi * d * d);
}

}  // namespace detail

// Analytic lower bound on the flux; requires a strict temperature difference.
inline double flux_lower_bound(double gamma, double beta_l, double beta_r) {
  detail::require_betas(beta_l, beta_r);
  if (!(beta_r > beta_l))
    throw std::invalid_argument("flux_lower_bound: beta_r must exceed beta_l");
  const double d = 0.5 * (beta_r - beta_l);
  const double bbar = 0.5 * (beta_r + beta_l);
  const double e0 = std::cosh(d) + std::cosh(bbar);
  if (gamma == 0.0) return 4.0 * detail::bound_moment_free(d) / e0;
  const auto co = flux_coefficients(gamma);
  return 2.0 * co.b * detail::bound_moment_perturbed(d) / ((co.a + co.b + co.c) * e0);
}

// J = (1/pi) int_0^{pi/2} sin(2k) Delta(cos k) bracket(gamma, sin k) dk.
inline FluxResult heat_flux(double gamma, double beta_l, double beta_r,
                            double tol = kDefaultTol) {
  detail::require_betas(beta_l, beta_r);
  FluxResult out;
  out.gamma = gamma;
  out.beta_l = beta_l;
  out.beta_r = beta_r;
  auto f = [&](double k) {
    return std::sin(2.0 * k) * momentum::delta_fermi(beta_l, beta_r, std::cos(k)) *
           bracket(gamma, std::sin(k));
  };
  const auto r = quad::integrate(f, 0.0, 0.5 * kPi, tol * kPi);
  out.j = r.value / kPi;
  out.quad_error = r.error / kPi;
  out.converged = r.converged;
  out.sigma = (beta_r - beta_l) * out.j;
  out.lower_bound = beta_r > beta_l ? flux_lower_bound(gamma, beta_l, beta_r) : 0.0;
  out.upper_bound = 0.5;
  return out;
}

inline double entropy_production(const FluxResult& fr) {
  return (fr.beta_r - fr.beta_l) * fr.j;
}

// Evaluates the flux over a grid of couplings; rows keep the grid order.
inline std::vector<FluxResult> sweep(const std::vector<double>& gammas,
                                     double beta_l, double beta_r,
                                     double tol = kDefaultTol, int threads = 0) {
  detail::require_betas(beta_l, beta_r);
  std::vector<FluxResult> rows(gammas.size());
  unsigned want = threads > 0 ? static_cast<unsigned>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  want = std::min<unsigned>(want, std::max<size_t>(gammas.size(), 1));
  if (want <= 1 || gammas.size() <= 1) {
    for (size_t i = 0; i < gammas.size(); ++i)
      rows[i] = heat_flux(gammas[i], beta_l, beta_r, tol);
    return rows;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= gammas.size()) return;
      rows[i] = heat_flux(gammas[i], beta_l, beta_r, tol);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < want; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return rows;
}

// ---- steady-state two-point function (scattering sector) -----------------------

// A finite combination of doubled site vectors.
struct DoubledTerm {
  int site = 0;
  bool hole = false;
  Complex coeff{1.0, 0.0};
};
using DoubledCombo = std::vector<DoubledTerm>;

// <F, S_+ G> restricted to the absolutely continuous sector, evaluated in
// momentum space: the wave images of F and G weighted by the two reservoir
// densities (particle component against s_{-bl,-br}, hole against s_{br,bl}).
inline quad::Result<Complex> ness_ac_two_point(const DoubledCombo& F,
                                               const DoubledCombo& G,
                                               double gamma, int a,
                                               double beta_l, double beta_r,
                                               double tol = kDefaultTol) {
  detail::require_betas(beta_l, beta_r);
  std::vector<std::pair<Complex, scattering::WaveImage>> fu, gu;
  for (const auto& t : F)
    fu.emplace_back(t.coeff, t.hole ? scattering::wave_apply_hole(gamma, t.site, a)
                                    : scattering::wave_apply(gamma, t.site, a));
  for (const auto& t : G)
    gu.emplace_back(t.coeff, t.hole ? scattering::wave_apply_hole(gamma, t.site, a)
                                    : scattering::wave_apply(gamma, t.site, a));

  auto component = [](const std::vector<std::pair<Complex, scattering::WaveImage>>& terms,
                      double k, bool hole) {
    Complex acc(0.0, 0.0);
    for (const auto& [c, img] : terms)
      acc += c * (hole ? img.hole.eval(k) : img.particle.eval(k));
    return acc;
  };
  auto f = [&](double k) {
    const double m1 = momentum::two_sided_density(-beta_l, -beta_r, k);
    const double m2 = momentum::two_sided_density(beta_r, beta_l, k);
    const Complex u1 = component(fu, k, false), v1 = component(gu, k, false);
    const Complex u2 = component(fu, k, true), v2 = component(gu, k, true);
    return (std::conj(u1) * m1 * v1 + std::conj(u2) * m2 * v2) / (2.0 * kPi);
  };
  return quad::integrate_intervals(f, scattering::detail::kBandIntervals, 2, tol);
}

// The steady-state flux recovered from the two-point function across the
// left boundary bond pair: -Im <W e_{-(n+2)}, S_+ W e_{-n}>.
inline double flux_from_two_point(double gamma, int a, int n, double beta_l,
                                  double beta_r, double tol = kDefaultTol) {
  const DoubledCombo F = {{-(n + 2), false, Complex(1.0, 0.0)}};
  const DoubledCombo G = {{-n, false, Complex(1.0, 0.0)}};
  const auto r = ness_ac_two_point(F, G, gamma, a, beta_l, beta_r, tol);
  return -std::imag(r.value);
}

}  // namespace nessxy::flux
