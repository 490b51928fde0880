#pragma once
// Stationary scattering data for the locally perturbed chain: free resolvent
// boundary values, the 4x4 interaction matrix on the perturbed bond, and the
// closed-form images of the wave operator in momentum space.
//
// Band-edge handling: every wave expression is evaluated over the common
// denominator g(k) = D(k) sin^2(k), with the 1/sin factors of the raw
// formulas cancelled symbolically.  Points with |sin k| <= 1e-9 form the
// declared exceptional set of an image.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "nessxy/momentum.hpp"
#include "nessxy/quadrature.hpp"

namespace nessxy::scattering {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;

inline constexpr double kPi = momentum::kPi;
inline constexpr double kEdgeClamp = 1e-9;  // |sin k| below this is exceptional

// exp(i arccos e) for |e| < 1: the in-band phase factor.
inline Complex band_phase(double e) {
  return {e, std::sqrt(1.0 - e * e)};
}

// Boundary value (from the lower half-plane) of the free resolvent kernel at
// distance |x|: -i (e + i sqrt(1-e^2))^{|x|} / sqrt(1-e^2).
inline Complex free_resolvent_edge(double e, int x) {
  if (!(std::abs(e) < 1.0))
    throw std::invalid_argument("free_resolvent_edge: e must lie inside the band");
  const double r = std::sqrt(1.0 - e * e);
  const Complex w = band_phase(e);
  return Complex(0.0, -1.0) * std::pow(w, std::abs(x)) / r;
}

// ---- interaction matrix -----------------------------------------------------
// Basis on the perturbed bond: (particle a, particle a+1, hole a, hole a+1).
// Kronecker products put the first factor on the particle/hole block index.

namespace detail {

inline Matrix4 kron2(const Eigen::Matrix2cd& p, const Eigen::Matrix2cd& q) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = p(i, j) * q;
  return out;
}

inline Eigen::Matrix2cd pauli(int which) {
  Eigen::Matrix2cd s;
  const Complex i1(0.0, 1.0);
  switch (which) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i1, i1, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: s.setIdentity(); break;
  }
  return s;
}

}  // namespace detail

inline Matrix4 interaction_matrix(double gamma, double e) {
  const Complex a1 = free_resolvent_edge(e, 1);
  const Complex a0 = free_resolvent_edge(e, 0);
  return Matrix4::Identity() +
         (gamma / 2.0) * (a1 * detail::kron2(detail::pauli(1), detail::pauli(3)) +
                          a0 * detail::kron2(detail::pauli(2), detail::pauli(2)));
}

inline Complex interaction_det(double gamma, double e) {
  if (!(std::abs(e) < 1.0))
    throw std::invalid_argument("interaction_det: e must lie inside the band");
  const double r2 = 1.0 - e * e;
  const Complex w = band_phase(e);
  return 1.0 + gamma * gamma * (w / r2) * (e - 0.25 * gamma * gamma * w);
}

// Closed-form inverse; coefficients of the Pauli-product expansion.
inline Matrix4 interaction_inverse(double gamma, double e) {
  if (!(std::abs(e) < 1.0))
    throw std::invalid_argument("interaction_inverse: e must lie inside the band");
  const double r = std::sqrt(1.0 - e * e);
  const double g2 = gamma * gamma;
  const Complex w = band_phase(e);
  const Complex i1(0.0, 1.0);
  const Complex wr = w / r;
  const Complex b1 = 1.0 + 0.5 * g2 * e * w / (r * r);
  const Complex b2 = -0.5 * g2 * w / (r * r);
  const Complex b3 = i1 * (gamma / 2.0) * wr * (1.0 + i1 * 0.5 * g2 * wr);
  const Complex b4 = i1 * (gamma / 2.0) * (1.0 / r) * (1.0 - i1 * 0.5 * g2 * wr);
  const Complex det = interaction_det(gamma, e);
  return (b1 * Matrix4::Identity() +
          b2 * detail::kron2(detail::pauli(3), detail::pauli(1)) +
          b3 * detail::kron2(detail::pauli(1), detail::pauli(3)) +
          b4 * detail::kron2(detail::pauli(2), detail::pauli(2))) /
         det;
}

// ---- spectral denominator ----------------------------------------------------

// g(k) = D(k) sin^2 k = sin^2 k + gamma^2 E (cos k - (gamma^2/4) E) with
// E = exp(i|k|).  Defined for every k, including the band edges.
inline Complex spectral_denominator(double gamma, double k) {
  const double s = std::abs(std::sin(k));
  const double c = std::cos(k);
  const double ak = std::abs(k);
  const Complex E(std::cos(ak), std::sin(ak));
  const double g2 = gamma * gamma;
  return s * s + g2 * E * (c - 0.25 * g2 * E);
}

// D(k) itself; requires k away from the band edges.
inline Complex d_gamma(double gamma, double k) {
  const double s = std::sin(k);
  if (std::abs(s) <= kEdgeClamp)
    throw std::domain_error("d_gamma: band edge (sin k = 0)");
  return spectral_denominator(gamma, k) / (s * s);
}

// ---- wave-operator images -----------------------------------------------------

namespace detail {

struct BandPoint {
  double s;      // |sin k|
  double c;      // cos k
  double ak;     // |k|
  Complex g;     // spectral denominator
};

inline BandPoint band_point(double gamma, double k) {
  BandPoint p;
  p.s = std::abs(std::sin(k));
  p.c = std::cos(k);
  p.ak = std::abs(k);
  const double g2 = gamma * gamma;
  const Complex E(std::cos(p.ak), std::sin(p.ak));
  p.g = p.s * p.s + g2 * E * (p.c - 0.25 * g2 * E);
  return p;
}

inline Complex expi(double t) { return {std::cos(t), std::sin(t)}; }

inline double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// First-kind numerator over the common denominator g(k):
//   E^p + E^q + i (gamma^2/2) E (E^p - E^q)/s,   p = |x-a2|+1, q = |x-a1|,
// with (E^p - E^q)/s reduced to 2 i E^{q+1} when p = q + 2.
inline Complex wave_numerator_1(double gamma, int x, int a1, int a2,
                                const BandPoint& bp) {
  const int p = std::abs(x - a2) + 1;
  const int q = std::abs(x - a1);
  const Complex Ep = expi(p * bp.ak);
  const Complex Eq = expi(q * bp.ak);
  Complex ratio;
  if (p == q)
    ratio = 0.0;
  else if (p == q + 2)
    ratio = Complex(0.0, 2.0) * expi((q + 1) * bp.ak);
  else
    ratio = (Ep - Eq) / bp.s;
  const Complex i1(0.0, 1.0);
  return Ep + Eq + i1 * 0.5 * gamma * gamma * expi(bp.ak) * ratio;
}

// Second-kind numerator over conj(g):
//   s Ebar^p + (gamma^2/2) Ebar (Ebar^p c - Ebar^q)/s,  p = |x-a2|, q = |x-a1|,
// with the ratio reduced to +-i Ebar^p when q = p +- 1.
inline Complex wave_numerator_2(double gamma, int x, int a1, int a2,
                                const BandPoint& bp) {
  const int p = std::abs(x - a2);
  const int q = std::abs(x - a1);
  const Complex Ebp = expi(-p * bp.ak);
  Complex ratio;
  if (q == p + 1)
    ratio = Complex(0.0, 1.0) * Ebp;
  else if (q == p - 1)
    ratio = Complex(0.0, -1.0) * Ebp;
  else
    ratio = (Ebp * bp.c - expi(-q * bp.ak)) / bp.s;
  return bp.s * Ebp + 0.5 * gamma * gamma * expi(-bp.ak) * ratio;
}

}  // namespace detail

// Single closed-form wave component; `which` selects the first or second kind.
inline Complex wave_component(double gamma, int x, int a1, int a2, int which,
                              double k) {
  if (which != 1 && which != 2)
    throw std::invalid_argument("wave_component: which must be 1 or 2");
  if (std::abs(std::sin(k)) <= kEdgeClamp)
    throw std::domain_error("wave_component: band edge (sin k = 0)");
  const auto bp = detail::band_point(gamma, k);
  if (which == 1)
    return (gamma / 2.0) * detail::expi(a1 * k) *
           detail::wave_numerator_1(gamma, x, a1, a2, bp) / bp.g;
  return Complex(0.0, 1.0) * detail::parity(x - a1) * detail::expi(a1 * k) *
         detail::wave_numerator_2(gamma, x, a1, a2, bp) / std::conj(bp.g);
}

// Momentum-space image of a doubled site vector under the wave operator.
struct WaveImage {
  double gamma = 0.0;
  int x = 0;
  int a = 0;
  momentum::MomentumFunction particle, hole;
};

// Image of (site x) (+) 0.  The two bond orientations are summed over the
// common denominator before dividing, so the |gamma| = 2 band-edge
// cancellation happens in exact arithmetic.
inline WaveImage wave_apply(double gamma, int x, int a) {
  WaveImage img;
  img.gamma = gamma;
  img.x = x;
  img.a = a;
  if (gamma == 0.0) {
    img.particle = {[x](double k) { return detail::expi(x * k); }, {}};
    img.hole = {[](double) { return Complex(0.0, 0.0); }, {}};
    return img;
  }
  const std::vector<double> edges = {-kPi, 0.0, kPi};
  img.particle = {
      [gamma, x, a](double k) {
        if (std::abs(std::sin(k)) <= kEdgeClamp)
          throw std::domain_error("wave image: band edge");
        const auto bp = detail::band_point(gamma, k);
        const Complex sum =
            detail::expi(a * k) * detail::wave_numerator_1(gamma, x, a, a + 1, bp) +
            detail::expi((a + 1) * k) * detail::wave_numerator_1(gamma, x, a + 1, a, bp);
        return detail::expi(x * k) - 0.25 * gamma * gamma * sum / bp.g;
      },
      edges};
  img.hole = {
      [gamma, x, a](double k) {
        if (std::abs(std::sin(k)) <= kEdgeClamp)
          throw std::domain_error("wave image: band edge");
        const auto bp = detail::band_point(gamma, k);
        const Complex sum =
            detail::expi(a * k) * detail::wave_numerator_2(gamma, x, a, a + 1, bp) +
            detail::expi((a + 1) * k) * detail::wave_numerator_2(gamma, x, a + 1, a, bp);
        const Complex i1(0.0, 1.0);
        return -(gamma / 2.0) * i1 * detail::parity(x - a) * sum / std::conj(bp.g);
      },
      edges};
  return img;
}

// Image of 0 (+) (site x): the block-swap conjugate of the particle image.
inline WaveImage wave_apply_hole(double gamma, int x, int a) {
  const WaveImage base = wave_apply(gamma, x, a);
  WaveImage img;
  img.gamma = gamma;
  img.x = x;
  img.a = a;
  auto bpart = base.particle;
  auto bhole = base.hole;
  img.particle = {[bhole](double k) { return std::conj(bhole.eval(-k)); },
                  bhole.exceptional};
  img.hole = {[bpart](double k) { return std::conj(bpart.eval(-k)); },
              bpart.exceptional};
  return img;
}

// ---- quadrature over images ----------------------------------------------------

namespace detail {
inline constexpr std::pair<double, double> kBandIntervals[2] = {
    {-kPi + kEdgeClamp, -kEdgeClamp}, {kEdgeClamp, kPi - kEdgeClamp}};
}

// <u, v> = (1/2pi) int conj(u1) v1 + conj(u2) v2 dk over the trimmed band.
inline quad::Result<Complex> image_inner(const WaveImage& u, const WaveImage& v,
                                         double tol = 1e-10) {
  auto f = [&](double k) {
    return (std::conj(u.particle.eval(k)) * v.particle.eval(k) +
            std::conj(u.hole.eval(k)) * v.hole.eval(k)) /
           (2.0 * kPi);
  };
  return quad::integrate_intervals(f, detail::kBandIntervals, 2, tol);
}

inline quad::Result<double> image_norm_sq(const WaveImage& u, double tol = 1e-9) {
  auto f = [&](double k) {
    return (std::norm(u.particle.eval(k)) + std::norm(u.hole.eval(k))) /
           (2.0 * kPi);
  };
  return quad::integrate_intervals(f, detail::kBandIntervals, 2, tol);
}

}  // namespace nessxy::scattering
