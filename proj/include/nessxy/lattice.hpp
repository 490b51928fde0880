#pragma once
// One-particle operators for the open XY chain on the truncated window
// [-trunc, trunc], and their doubled (particle (+) hole) liftings.
//
// Conventions: site x maps to row/column x + trunc; the doubled space stacks
// the particle block first.  The antiunitary block swap G acts on vectors as
// G(f (+) g) = conj(g) (+) conj(f).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "nessxy/momentum.hpp"

namespace nessxy::lattice {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// ---- configuration ----------------------------------------------------------

struct LatticeConfig {
  int n = 1;           // sample occupies |x| <= n
  int a = 0;           // perturbed bond {a, a+1}
  double gamma = 0.0;  // anisotropy strength
  double beta_l = 0.0;
  double beta_r = 0.0;
  int trunc = 8;       // window half-width

  void validate() const {
    if (n < 1) throw std::invalid_argument("LatticeConfig: n must be >= 1");
    if (a < -n || a > n - 1)
      throw std::invalid_argument("LatticeConfig: bond {a, a+1} must lie in the sample");
    if (trunc <= n + 2)
      throw std::invalid_argument("LatticeConfig: trunc must exceed n + 2");
    if (beta_l < 0 || beta_r < 0)
      throw std::invalid_argument("LatticeConfig: inverse temperatures must be >= 0");
    if (beta_l > beta_r)
      throw std::invalid_argument("LatticeConfig: beta_l must not exceed beta_r");
  }

  int sites() const { return 2 * trunc + 1; }
  int dim() const { return 2 * sites(); }
  int idx(int x) const { return x + trunc; }            // one-particle index
  int pidx(int x) const { return idx(x); }              // particle block
  int hidx(int x) const { return sites() + idx(x); }    // hole block
};

// ---- one-particle builders --------------------------------------------------

// Nearest-neighbour hopping with coupling 1/2 (Dirichlet ends).
inline Mat hopping(int trunc) {
  if (trunc < 1) throw std::invalid_argument("hopping: trunc must be >= 1");
  const int m = 2 * trunc + 1;
  Mat h = Mat::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    h(i, i + 1) = 0.5;
    h(i + 1, i) = 0.5;
  }
  return h;
}

// The two bonds {-(n+1), -n} and {n, n+1} whose removal decouples the sample.
inline Mat decoupling_bonds(int n, int trunc) {
  if (n < 1 || trunc <= n + 1)
    throw std::invalid_argument("decoupling_bonds: need 1 <= n and trunc > n + 1");
  const int m = 2 * trunc + 1;
  const int off = trunc;
  Mat v = Mat::Zero(m, m);
  v(off - n - 1, off - n) = 0.5;
  v(off - n, off - n - 1) = 0.5;
  v(off + n, off + n + 1) = 0.5;
  v(off + n + 1, off + n) = 0.5;
  return v;
}

// Anisotropy generator on the bond {a, a+1}: entries -i/2 / +i/2.
inline CMat anisotropy(int a, int trunc) {
  if (a < -trunc || a + 1 > trunc)
    throw std::invalid_argument("anisotropy: bond {a, a+1} outside the window");
  const int m = 2 * trunc + 1;
  CMat v = CMat::Zero(m, m);
  const Complex i2(0.0, 0.5);
  v(a + trunc, a + 1 + trunc) = -i2;
  v(a + 1 + trunc, a + trunc) = i2;
  return v;
}

// Hopping restricted to the left (x <= -(n+1)) or right (x >= n+1) reservoir.
inline Mat reservoir_hopping(int n, int trunc, bool left) {
  if (n < 1 || trunc <= n + 1)
    throw std::invalid_argument("reservoir_hopping: need 1 <= n and trunc > n + 1");
  const int m = 2 * trunc + 1;
  Mat h = Mat::Zero(m, m);
  const int lo = left ? 0 : trunc + n + 1;
  const int hi = left ? trunc - n - 1 : m - 1;
  for (int i = lo; i < hi; ++i) {
    h(i, i + 1) = 0.5;
    h(i + 1, i) = 0.5;
  }
  return h;
}

// ---- doubled liftings -------------------------------------------------------

enum class Lift { sigma0, sigma2, sigma3 };

// m sigma_0 = diag(m, m); m sigma_3 = diag(m, -m);
// m sigma_2 = [[0, -i m], [i m, 0]].
inline CMat lift(const CMat& m, Lift which) {
  const Eigen::Index s = m.rows();
  if (m.cols() != s) throw std::invalid_argument("lift: matrix must be square");
  CMat out = CMat::Zero(2 * s, 2 * s);
  const Complex i1(0.0, 1.0);
  switch (which) {
    case Lift::sigma0:
      out.topLeftCorner(s, s) = m;
      out.bottomRightCorner(s, s) = m;
      break;
    case Lift::sigma2:
      out.topRightCorner(s, s) = -i1 * m;
      out.bottomLeftCorner(s, s) = i1 * m;
      break;
    case Lift::sigma3:
      out.topLeftCorner(s, s) = m;
      out.bottomRightCorner(s, s) = -m;
      break;
  }
  return out;
}

// H_gamma: free chain plus the anisotropic bond.
inline CMat doubled_hamiltonian(double gamma, int a, int trunc) {
  return lift(hopping(trunc).cast<Complex>(), Lift::sigma3) +
         gamma * lift(anisotropy(a, trunc), Lift::sigma2);
}

inline CMat doubled_hamiltonian(const LatticeConfig& cfg) {
  cfg.validate();
  return doubled_hamiltonian(cfg.gamma, cfg.a, cfg.trunc);
}

// H_delta: the chain with both sample-reservoir bonds removed.
inline CMat decoupled_hamiltonian(const LatticeConfig& cfg) {
  cfg.validate();
  const Mat h = hopping(cfg.trunc) - decoupling_bonds(cfg.n, cfg.trunc);
  return lift(h.cast<Complex>(), Lift::sigma3);
}

// Left/right reservoir part of the free Hamiltonian, doubled.
inline CMat doubled_reservoir(int n, int trunc, bool left) {
  return lift(reservoir_hopping(n, trunc, left).cast<Complex>(), Lift::sigma3);
}

// Heat-flux observable for the left (or right) reservoir boundary: the
// commutator -i[H_gamma, H_reservoir], which is supported on one bond pair.
inline CMat flux_observable(int n, int trunc, bool left = true) {
  if (n < 1 || trunc <= n + 2)
    throw std::invalid_argument("flux_observable: need 1 <= n and trunc > n + 2");
  const int m = 2 * trunc + 1;
  const int inner = left ? trunc - n : trunc + n;          // site -n or n
  const int outer = left ? trunc - n - 2 : trunc + n + 2;  // site -(n+2) or n+2
  CMat phi = CMat::Zero(m, m);
  const Complex i4(0.0, 0.25);
  phi(inner, outer) = -i4;
  phi(outer, inner) = i4;
  return lift(phi, Lift::sigma0);
}

// ---- initial two-point operator ---------------------------------------------

// Spectral application of the Fermi factor to a symmetric matrix.
inline Mat fermi_matrix(double beta, const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fermi_matrix: eigensolver failed");
  Eigen::VectorXd f(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f[i] = momentum::fermi_dirac(beta, es.eigenvalues()[i]);
  Mat out = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

// Two-point operator of the decoupled initial state: reservoirs thermal at
// their own temperatures, sample at infinite temperature.
inline CMat initial_two_point(const LatticeConfig& cfg) {
  cfg.validate();
  const int m = cfg.sites();
  const int nl = cfg.trunc - cfg.n;  // reservoir block size
  const int ns = 2 * cfg.n + 1;      // sample block size

  Mat tri = Mat::Zero(nl, nl);
  for (int i = 0; i + 1 < nl; ++i) {
    tri(i, i + 1) = 0.5;
    tri(i + 1, i) = 0.5;
  }
  Mat s = Mat::Zero(m, m);
  s.topLeftCorner(nl, nl) = fermi_matrix(cfg.beta_l, tri);
  s.block(nl, nl, ns, ns) = 0.5 * Mat::Identity(ns, ns);
  s.bottomRightCorner(nl, nl) = fermi_matrix(cfg.beta_r, tri);

  CMat out = CMat::Zero(2 * m, 2 * m);
  out.topLeftCorner(m, m) = (Mat::Identity(m, m) - s).cast<Complex>();
  out.bottomRightCorner(m, m) = s.cast<Complex>();
  return out;
}

// ---- block-swap symmetry ----------------------------------------------------

// G A G for the antiunitary block swap: conjugate entrywise, then swap the
// two blocks in both indices.
inline CMat gamma_conjugate(const CMat& A) {
  const Eigen::Index d = A.rows();
  if (A.cols() != d || d % 2 != 0)
    throw std::invalid_argument("gamma_conjugate: need an even-dimensional square matrix");
  const Eigen::Index s = d / 2;
  CMat B(d, d);
  B.topLeftCorner(s, s) = A.bottomRightCorner(s, s).conjugate();
  B.topRightCorner(s, s) = A.bottomLeftCorner(s, s).conjugate();
  B.bottomLeftCorner(s, s) = A.topRightCorner(s, s).conjugate();
  B.bottomRightCorner(s, s) = A.topLeftCorner(s, s).conjugate();
  return B;
}

inline CVec gamma_apply(const CVec& f) {
  const Eigen::Index d = f.size();
  if (d % 2 != 0) throw std::invalid_argument("gamma_apply: odd dimension");
  const Eigen::Index s = d / 2;
  CVec out(d);
  out.head(s) = f.tail(s).conjugate();
  out.tail(s) = f.head(s).conjugate();
  return out;
}

// Defects against the structure a Hamiltonian / two-point operator must have.
inline double self_adjoint_defect(const CMat& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}
inline double hamiltonian_parity_defect(const CMat& A) {
  return (gamma_conjugate(A) + A).cwiseAbs().maxCoeff();
}
inline double two_point_parity_defect(const CMat& S) {
  const CMat one = CMat::Identity(S.rows(), S.cols());
  return (gamma_conjugate(S) - (one - S)).cwiseAbs().maxCoeff();
}

// ---- lattice symmetries of the free chain ------------------------------------

struct SymmetryReport {
  double shift_interior = 0.0;      // max |[h, u]| over interior rows
  double shift_boundary = 0.0;      // max |[h, u]| over the two edge rows
  double reflection = 0.0;          // max |[h, theta]|
  double gauge = 0.0;               // max |{h, xi}|
};

// u = right shift, theta = reflection through 0, xi = (-1)^x.  The shift
// commutes with h away from the truncation edges; reflection and gauge are
// exact on the whole window.
inline SymmetryReport check_symmetries(int trunc) {
  const int m = 2 * trunc + 1;
  const Mat h = hopping(trunc);
  Mat u = Mat::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) u(i + 1, i) = 1.0;
  Mat theta = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) theta(m - 1 - i, i) = 1.0;
  Eigen::VectorXd xi(m);
  for (int x = -trunc; x <= trunc; ++x) xi[x + trunc] = (x % 2 == 0) ? 1.0 : -1.0;

  const Mat cu = h * u - u * h;
  const Mat ct = h * theta - theta * h;
  const Mat ax = h * xi.asDiagonal() + xi.asDiagonal() * h;

  SymmetryReport rep;
  for (int r = 0; r < m; ++r) {
    const double rowmax_u = cu.row(r).cwiseAbs().maxCoeff();
    if (r == 0 || r == m - 1)
      rep.shift_boundary = std::max(rep.shift_boundary, rowmax_u);
    else
      rep.shift_interior = std::max(rep.shift_interior, rowmax_u);
  }
  rep.reflection = ct.cwiseAbs().maxCoeff();
  rep.gauge = ax.cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace nessxy::lattice
