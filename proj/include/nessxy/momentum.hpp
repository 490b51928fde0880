#pragma once
// Band functions and the momentum/energy representations of the chain.
//
// Momentum space is [-pi, pi) with norm^2 = (1/2pi) int |phi|^2 dk, so the
// site basis vectors e_x(k) = exp(ikx) have unit norm.  Energy space carries
// two components over the band (-1, 1).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nessxy::momentum {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr int kDefaultGrid = 4096;

// ---- Fermi factors ---------------------------------------------------------

// rho_beta(e) = 1 / (1 + exp(beta e)), evaluated without overflow.
inline double fermi_dirac(double beta, double e) {
  const double be = beta * e;
  if (be > 0) {
    const double z = std::exp(-be);
    return z / (1.0 + z);
  }
  return 1.0 / (1.0 + std::exp(be));
}

// Reservoir occupation difference rho_{beta_l}(e) - rho_{beta_r}(e).
// Evaluated on |e| and sign-restored, so it is odd to the last bit.
inline double delta_fermi(double beta_l, double beta_r, double e) {
  const double m = std::abs(e);
  const double d = fermi_dirac(beta_l, m) - fermi_dirac(beta_r, m);
  return e < 0 ? -d : d;
}

// Equivalent closed form sinh(d e) / (cosh(d e) + cosh(b e)) with
// d = (beta_r - beta_l)/2, b = (beta_r + beta_l)/2.  Cross-check path only.
inline double delta_fermi_hyperbolic(double beta_l, double beta_r, double e) {
  const double d = 0.5 * (beta_r - beta_l);
  const double b = 0.5 * (beta_r + beta_l);
  const double de = d * e, be = b * e;
  if (std::abs(de) > 350.0 || std::abs(be) > 350.0) {
    // Large arguments: divide through by exp(max|.|) to stay finite.
    const double m = std::max(std::abs(de), std::abs(be));
    const double num = 0.5 * (std::exp(de - m) - std::exp(-de - m));
    const double den = 0.5 * (std::exp(be - m) + std::exp(-be - m)) +
                       0.5 * (std::exp(de - m) + std::exp(-de - m));
    return num / den;
  }
  return std::sinh(de) / (std::cosh(de) + std::cosh(be));
}

// Two-sided momentum density: rho_alpha(cos k) on [0, pi], rho_beta(cos k)
// on [-pi, 0).  k = 0 belongs to the first branch.
inline double two_sided_density(double alpha, double beta, double k) {
  return k >= 0 ? fermi_dirac(alpha, std::cos(k)) : fermi_dirac(beta, std::cos(k));
}

// ---- Momentum-space functions ----------------------------------------------

// A function on the momentum circle, possibly undefined on a finite set.
struct MomentumFunction {
  std::function<Complex(double)> eval;
  std::vector<double> exceptional;  // points where eval must not be called

  bool defined_at(double k, double radius = 1e-12) const {
    for (double p : exceptional)
      if (std::abs(k - p) <= radius) return false;
    return true;
  }
};

// Uniform grid k_j = -pi + 2 pi j / size, j = 0 .. size-1.
inline std::vector<double> momentum_grid(int size = kDefaultGrid) {
  if (size < 2) throw std::invalid_argument("momentum_grid: size < 2");
  std::vector<double> k(size);
  for (int j = 0; j < size; ++j) k[j] = -kPi + 2.0 * kPi * j / size;
  return k;
}

// ---- Energy representation --------------------------------------------------

// Pair of functions on the band (-1, 1); component 1 carries k in [0, pi],
// component 2 carries k in [-pi, 0].
struct EnergyFunctionPair {
  std::function<Complex(double)> first, second;
};

// Unitary map from momentum to energy space: both branches of k(e) = arccos e,
// weighted by the inverse square-root of the band velocity.
inline EnergyFunctionPair energy_transform(const MomentumFunction& phi) {
  auto f = phi.eval;
  auto weight = [](double e) {
    return 1.0 / (std::sqrt(2.0 * kPi) * std::pow(1.0 - e * e, 0.25));
  };
  return {
      [f, weight](double e) { return f(std::acos(e)) * weight(e); },
      [f, weight](double e) { return f(-std::acos(e)) * weight(e); },
  };
}

// Adjoint map back to momentum space; k = 0 reads the first component.
inline MomentumFunction energy_adjoint(const EnergyFunctionPair& eta) {
  auto f1 = eta.first;
  auto f2 = eta.second;
  return {[f1, f2](double k) {
            const double e = std::cos(k);
            const double w = std::sqrt(2.0 * kPi) * std::pow(1.0 - e * e, 0.25);
            return w * (k >= 0 ? f1(e) : f2(e));
          },
          {-kPi, 0.0, kPi}};
}

// Energy-space norm^2 via the substitution e = cos(theta); the midpoint rule
// in theta keeps all nodes inside the band.
inline double energy_norm_sq(const EnergyFunctionPair& eta, int nodes = 10000) {
  double acc = 0.0;
  const double h = kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double th = (j + 0.5) * h;
    const double e = std::cos(th);
    acc += (std::norm(eta.first(e)) + std::norm(eta.second(e))) * std::sin(th);
  }
  return acc * h;
}

// Momentum-space norm^2 on the same theta grid folded to both half-circles.
inline double momentum_norm_sq(const MomentumFunction& phi, int nodes = 10000) {
  double acc = 0.0;
  const double h = kPi / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double k = (j + 0.5) * h;
    acc += std::norm(phi.eval(k)) + std::norm(phi.eval(-k));
  }
  return acc * h / (2.0 * kPi);
}

}  // namespace nessxy::momentum
