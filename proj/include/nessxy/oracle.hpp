#pragma once
// Finite-volume dynamical cross-checks, independent of every closed form in
// the scattering and flux modules: direct diagonalization of the doubled
// Hamiltonian, window-averaged boundary fluxes, bound-state detection,
// eigenvalue-cluster flux matrix elements, a sparse resolvent solve, and a
// brute-force time-limit construction of the wave-operator images.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nessxy/lattice.hpp"
#include "nessxy/momentum.hpp"

namespace nessxy::oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kBandTol = 1e-8;  // |lambda| > 1 + kBandTol is a bound state

// ---- diagonalization ----------------------------------------------------------

struct EigenSystem {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns
};

inline EigenSystem diagonalize(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("diagonalize: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// The doubled operators built by the lattice module are real in exact
// arithmetic; collapse to real storage and fail loudly if that ever breaks.
inline Mat real_part_checked(const CMat& m) {
  if (m.imag().cwiseAbs().maxCoeff() > 0.0)
    throw std::logic_error("real_part_checked: nonzero imaginary entries");
  return m.real();
}

namespace detail {

// U^T z and U z for real U, complex z, as paired real products.
inline CVec tr_apply(const Mat& u, const CVec& z) {
  const Vec a = u.transpose() * z.real().eval();
  const Vec b = u.transpose() * z.imag().eval();
  CVec out(u.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = Complex(a[i], b[i]);
  return out;
}

inline CVec apply(const Mat& u, const CVec& z) {
  const Vec a = u * z.real().eval();
  const Vec b = u * z.imag().eval();
  CVec out(u.rows());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = Complex(a[i], b[i]);
  return out;
}

inline Complex expi(double t) { return {std::cos(t), std::sin(t)}; }

}  // namespace detail

// ---- evolution context ----------------------------------------------------------

struct EvolutionContext {
  lattice::LatticeConfig config;
  EigenSystem es;  // of the doubled Hamiltonian
  Mat s_tilde;     // initial two-point operator in the eigenbasis
};

inline EvolutionContext make_context(const lattice::LatticeConfig& cfg) {
  cfg.validate();
  EvolutionContext ctx;
  ctx.config = cfg;
  ctx.es = diagonalize(real_part_checked(lattice::doubled_hamiltonian(cfg)));
  const Mat s0 = real_part_checked(lattice::initial_two_point(cfg));
  const Mat tmp = s0 * ctx.es.vectors;
  ctx.s_tilde.noalias() = ctx.es.vectors.transpose() * tmp;
  return ctx;
}

// Pair correlation of the evolved state: <G F, S(t) G'> in the eigenbasis.
inline Complex evolved_two_point(const EvolutionContext& ctx, double t,
                                 const CVec& F, const CVec& G) {
  const Mat& u = ctx.es.vectors;
  if (F.size() != u.rows() || G.size() != u.rows())
    throw std::invalid_argument("evolved_two_point: dimension mismatch");
  const CVec a = detail::tr_apply(u, lattice::gamma_apply(F));
  const CVec b = detail::tr_apply(u, G);
  const Eigen::Index d = u.cols();
  CVec w(d);
  for (Eigen::Index i = 0; i < d; ++i)
    w[i] = detail::expi(ctx.es.values[i] * t) * b[i];
  const Vec yr = ctx.s_tilde * w.real().eval();
  const Vec yi = ctx.s_tilde * w.imag().eval();
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < d; ++i)
    acc += std::conj(a[i]) * detail::expi(-ctx.es.values[i] * t) * Complex(yr[i], yi[i]);
  return acc;
}

// ---- window-averaged boundary fluxes --------------------------------------------

// Exact time average of sin(theta t) over [t0, t1]; the cosine difference is
// written as a product of sines so near-degenerate frequencies do not cancel.
inline double window_weight(double theta, double t0, double t1) {
  if (std::abs(theta) < 1e-9) return 0.5 * theta * (t1 + t0);
  return 2.0 * std::sin(0.5 * theta * (t1 + t0)) * std::sin(0.5 * theta * (t1 - t0)) /
         (theta * (t1 - t0));
}

struct BoundaryFluxes {
  double left = 0.0;
  double right = 0.0;
};

// Average of the two boundary flux expectations over [t_max/2, t_max],
// evaluated exactly in the eigenbasis (no time grid).  The flux observable
// matrix elements are assembled on the fly from the eight rows of the
// eigenvector matrix that enter the two bond-pair observables.
inline BoundaryFluxes ergodic_fluxes(const EvolutionContext& ctx, double t_max) {
  if (!(t_max > 0)) throw std::invalid_argument("ergodic_fluxes: t_max must be > 0");
  const auto& cfg = ctx.config;
  const Mat& u = ctx.es.vectors;
  const Vec& lam = ctx.es.values;
  const double t0 = 0.5 * t_max;
  const Eigen::Index d = u.cols();

  const Vec lpo = u.row(cfg.pidx(-(cfg.n + 2))).transpose();
  const Vec lpi = u.row(cfg.pidx(-cfg.n)).transpose();
  const Vec lho = u.row(cfg.hidx(-(cfg.n + 2))).transpose();
  const Vec lhi = u.row(cfg.hidx(-cfg.n)).transpose();
  const Vec rpo = u.row(cfg.pidx(cfg.n + 2)).transpose();
  const Vec rpi = u.row(cfg.pidx(cfg.n)).transpose();
  const Vec rho = u.row(cfg.hidx(cfg.n + 2)).transpose();
  const Vec rhi = u.row(cfg.hidx(cfg.n)).transpose();

  double jl = 0.0, jr = 0.0;
  for (Eigen::Index b = 1; b < d; ++b) {
    for (Eigen::Index a = 0; a < b; ++a) {
      const double w = window_weight(lam[a] - lam[b], t0, t_max);
      const double s = ctx.s_tilde(a, b);
      const double psi_l =
          0.25 * ((lpo[a] * lpi[b] - lpi[a] * lpo[b]) + (lho[a] * lhi[b] - lhi[a] * lho[b]));
      const double psi_r =
          0.25 * ((rpo[a] * rpi[b] - rpi[a] * rpo[b]) + (rho[a] * rhi[b] - rhi[a] * rho[b]));
      jl += 2.0 * s * psi_l * w;
      jr += 2.0 * s * psi_r * w;
    }
  }
  return {jl, jr};
}

// ---- bound states ----------------------------------------------------------------

struct BoundState {
  double value = 0.0;
  Vec vector;
};

inline std::vector<BoundState> bound_states(double gamma, int a, int trunc,
                                            double band_tol = kBandTol) {
  const auto es =
      diagonalize(real_part_checked(lattice::doubled_hamiltonian(gamma, a, trunc)));
  std::vector<BoundState> out;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values[i]) > 1.0 + band_tol)
      out.push_back({es.values[i], es.vectors.col(i)});
  return out;
}

inline int count_bound_states(const EigenSystem& es, double band_tol = kBandTol) {
  int count = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values[i]) > 1.0 + band_tol) ++count;
  return count;
}

// ---- oracle summary ---------------------------------------------------------------

struct OracleRun {
  lattice::LatticeConfig config;
  double t_max = 0.0;
  double window_start = 0.0;
  double j_left = 0.0;
  double j_right = 0.0;
  double first_law_residual = 0.0;
  int bound_state_count = 0;
  bool wavefront_ok = true;
  double wavefront_budget = 0.0;
};

// Largest averaging time for which no wavefront from the sample boundary can
// reach the truncation edge (unit maximal group velocity).
inline double wavefront_budget(const lattice::LatticeConfig& cfg) {
  return static_cast<double>(cfg.trunc - (cfg.n + 2));
}

inline OracleRun ergodic_flux(const EvolutionContext& ctx, double t_max) {
  OracleRun run;
  run.config = ctx.config;
  run.t_max = t_max;
  run.window_start = 0.5 * t_max;
  run.wavefront_budget = wavefront_budget(ctx.config);
  run.wavefront_ok = t_max <= run.wavefront_budget;
  const auto bf = ergodic_fluxes(ctx, t_max);
  run.j_left = bf.left;
  run.j_right = bf.right;
  run.first_law_residual = std::abs(bf.left + bf.right);
  run.bound_state_count = count_bound_states(ctx.es);
  return run;
}

inline OracleRun ergodic_flux(const lattice::LatticeConfig& cfg, double t_max) {
  return ergodic_flux(make_context(cfg), t_max);
}

// ---- point-spectrum flux check ------------------------------------------------------

struct PointSpectrumCheck {
  int bound_count = 0;
  int cluster_count = 0;
  double max_flux_element = 0.0;  // within eigenvalue clusters, both boundaries
};

// Time averaging kills every flux matrix element between distinct eigenvalues,
// so a nonzero steady contribution from the point spectrum could only live on
// the (near-)degenerate blocks.  Checks those blocks directly.
inline PointSpectrumCheck pp_flux_check(double gamma, int a, int n, int trunc,
                                        double cluster_tol = 1e-9,
                                        double band_tol = kBandTol) {
  const auto bs = bound_states(gamma, a, trunc, band_tol);
  PointSpectrumCheck out;
  out.bound_count = static_cast<int>(bs.size());
  if (bs.empty()) return out;

  const Mat psi_l = lattice::flux_observable(n, trunc, true).imag();
  const Mat psi_r = lattice::flux_observable(n, trunc, false).imag();

  size_t start = 0;
  while (start < bs.size()) {
    size_t stop = start + 1;
    while (stop < bs.size() && bs[stop].value - bs[stop - 1].value <= cluster_tol) ++stop;
    ++out.cluster_count;
    Mat b(bs[start].vector.size(), stop - start);
    for (size_t i = start; i < stop; ++i) b.col(i - start) = bs[i].vector;
    const Mat cl = b.transpose() * (psi_l * b);
    const Mat cr = b.transpose() * (psi_r * b);
    out.max_flux_element = std::max({out.max_flux_element, cl.cwiseAbs().maxCoeff(),
                                     cr.cwiseAbs().maxCoeff()});
    start = stop;
  }
  return out;
}

// ---- resolvent probe ------------------------------------------------------------------

// <delta_x, (h - (e - i eps))^{-1} delta_0> on a large truncated window.
inline Complex numerical_resolvent(double e, double eps, int x, int trunc) {
  if (std::abs(x) > trunc)
    throw std::invalid_argument("numerical_resolvent: site outside the window");
  if (!(eps > 0)) throw std::invalid_argument("numerical_resolvent: eps must be > 0");
  const int m = 2 * trunc + 1;
  Eigen::SparseMatrix<Complex> mat(m, m);
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(3 * m);
  const Complex z(e, -eps);
  for (int i = 0; i < m; ++i) {
    trip.emplace_back(i, i, -z);
    if (i + 1 < m) {
      trip.emplace_back(i, i + 1, Complex(0.5, 0.0));
      trip.emplace_back(i + 1, i, Complex(0.5, 0.0));
    }
  }
  mat.setFromTriplets(trip.begin(), trip.end());
  mat.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(mat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("numerical_resolvent: factorization failed");
  CVec rhs = CVec::Zero(m);
  rhs[trunc] = 1.0;
  const CVec sol = lu.solve(rhs);
  return sol[x + trunc];
}

// ---- wave-operator probe -----------------------------------------------------------------

struct WaveProbe {
  CVec particle;  // momentum-grid samples of the window-averaged image
  CVec hole;
  double late_window_variance = 0.0;
  bool converged = false;
  int bound_count = 0;
  double wavefront_budget = 0.0;
  bool wavefront_ok = true;
};

// Image of (site x) (+) 0 under the interchanged-dynamics limit
// exp(-itH_0) exp(itH_gamma) P_ac, averaged over `samples` times in
// [0.9 t_max, t_max] and transformed to the momentum grid.
inline WaveProbe numerical_wave_apply(double gamma, int x, int a, double t_max,
                                      int trunc, int grid = momentum::kDefaultGrid,
                                      int samples = 16,
                                      double variance_tol = 1e-6) {
  if (std::abs(x) > trunc || a < -trunc || a + 1 > trunc)
    throw std::invalid_argument("numerical_wave_apply: sites outside the window");
  if (!(t_max > 0) || samples < 2 || grid < 2)
    throw std::invalid_argument("numerical_wave_apply: bad probe parameters");
  const int m = 2 * trunc + 1;
  const int d = 2 * m;

  const auto es_g =
      diagonalize(real_part_checked(lattice::doubled_hamiltonian(gamma, a, trunc)));
  const auto es_h = diagonalize(lattice::hopping(trunc));

  WaveProbe probe;
  probe.bound_count = count_bound_states(es_g);
  probe.wavefront_budget = std::min(
      0.5 * trunc, double(trunc - std::max(std::abs(x), std::abs(a) + 1)));
  probe.wavefront_ok = t_max <= probe.wavefront_budget;

  Vec psi0 = Vec::Zero(d);
  psi0[x + trunc] = 1.0;
  for (Eigen::Index i = 0; i < es_g.values.size(); ++i)
    if (std::abs(es_g.values[i]) > 1.0 + kBandTol)
      psi0 -= es_g.vectors.col(i).dot(psi0) * es_g.vectors.col(i);

  const Vec c = es_g.vectors.transpose() * psi0;
  std::vector<CVec> shots(samples);
  CVec mean = CVec::Zero(d);
  for (int sidx = 0; sidx < samples; ++sidx) {
    const double t = 0.9 * t_max + 0.1 * t_max * sidx / (samples - 1.0);
    CVec z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = detail::expi(es_g.values[i] * t) * c[i];
    CVec phi = detail::apply(es_g.vectors, z);
    // free back-evolution, blockwise
    CVec pc = detail::tr_apply(es_h.vectors, phi.head(m));
    CVec hc = detail::tr_apply(es_h.vectors, phi.tail(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      pc[i] *= detail::expi(-es_h.values[i] * t);
      hc[i] *= detail::expi(es_h.values[i] * t);
    }
    CVec out(d);
    out.head(m) = detail::apply(es_h.vectors, pc);
    out.tail(m) = detail::apply(es_h.vectors, hc);
    shots[sidx] = out;
    mean += out;
  }
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (const auto& s : shots) var += (s - mean).squaredNorm();
  probe.late_window_variance = var / samples;
  probe.converged = probe.late_window_variance <= variance_tol && probe.wavefront_ok;

  probe.particle = CVec::Zero(grid);
  probe.hole = CVec::Zero(grid);
  const auto ks = momentum::momentum_grid(grid);
  for (int j = 0; j < grid; ++j) {
    const Complex step = detail::expi(ks[j]);
    Complex phase = detail::expi(-trunc * ks[j]);
    Complex accp(0.0, 0.0), acch(0.0, 0.0);
    for (int i = 0; i < m; ++i) {
      accp += mean[i] * phase;
      acch += mean[m + i] * phase;
      phase *= step;
    }
    probe.particle[j] = accp;
    probe.hole[j] = acch;
  }
  return probe;
}

}  // namespace nessxy::oracle
