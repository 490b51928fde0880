#include "nessxy/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "nessxy/flux.hpp"
#include "nessxy/lattice.hpp"
#include "nessxy/momentum.hpp"
#include "nessxy/oracle.hpp"
#include "nessxy/pfaffian.hpp"
#include "nessxy/scattering.hpp"

namespace nessxy::checks {

namespace {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

lattice::LatticeConfig make_config(int n, int a, double gamma, double bl,
                                   double br, int trunc) {
  lattice::LatticeConfig cfg;
  cfg.n = n;
  cfg.a = a;
  cfg.gamma = gamma;
  cfg.beta_l = bl;
  cfg.beta_r = br;
  cfg.trunc = trunc;
  return cfg;
}

// runs `body` (which fills value/detail), stamps timing, applies `pass`
template <class Body>
CheckResult timed(const std::string& name, double threshold, Body&& body,
                  bool strict_less = false) {
  CheckResult r;
  r.name = name;
  r.threshold = threshold;
  const auto t0 = Clock::now();
  body(r);
  r.seconds = seconds_since(t0);
  r.pass = strict_less ? (r.value < r.threshold) : (r.value <= r.threshold);
  return r;
}

CheckResult check_lattice_symmetries() {
  return timed("lattice-symmetries", 1e-13, [](CheckResult& r) {
    double worst = 0.0;
    for (const auto& cfg : {make_config(1, 0, 1.1, 1.0, 2.0, 30),
                            make_config(2, 1, 2.0, 0.5, 3.0, 40)}) {
      const CMat hg = lattice::doubled_hamiltonian(cfg);
      worst = std::max(worst, lattice::self_adjoint_defect(hg));
      worst = std::max(worst, lattice::hamiltonian_parity_defect(hg));
      const CMat s = lattice::initial_two_point(cfg);
      worst = std::max(worst, lattice::self_adjoint_defect(s));
      worst = std::max(worst, lattice::two_point_parity_defect(s));
      for (bool left : {true, false}) {
        const CMat hres = lattice::doubled_reservoir(cfg.n, cfg.trunc, left);
        const CMat comm = Complex(0.0, -1.0) * (hg * hres - hres * hg);
        const CMat phi = lattice::flux_observable(cfg.n, cfg.trunc, left);
        worst = std::max(worst, (phi - comm).cwiseAbs().maxCoeff());
      }
    }
    r.value = worst;
    r.detail = "2 configs, both boundaries";
  });
}

CheckResult check_momentum_oddness() {
  return timed("occupation-difference-odd", 1e-14, [](CheckResult& r) {
    double worst = 0.0;
    for (int i = 1; i < 400; ++i) {
      const double e = -1.0 + 2.0 * i / 400.0;
      worst = std::max(worst, std::abs(momentum::delta_fermi(1.0, 2.0, -e) +
                                       momentum::delta_fermi(1.0, 2.0, e)));
      worst = std::max(worst,
                       std::abs(momentum::delta_fermi(0.5, 3.0, e) -
                                momentum::delta_fermi_hyperbolic(0.5, 3.0, e)));
    }
    r.value = worst;
    r.detail = "sign reversal and hyperbolic form agree";
  });
}

CheckResult check_momentum_isometry(unsigned long long seed) {
  return timed("energy-map-isometry", 1e-8, [seed](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Complex> c(11);
      for (auto& z : c) z = Complex(g(rng), g(rng));
      momentum::MomentumFunction phi{
          [c](double k) {
            Complex acc = 0.0;
            for (int j = 0; j < int(c.size()); ++j)
              acc += c[j] * std::exp(Complex(0.0, (j - 5) * k));
            return acc;
          },
          {}};
      const double nk = momentum::momentum_norm_sq(phi);
      const double ne =
          momentum::energy_norm_sq(momentum::energy_transform(phi));
      worst = std::max(worst, std::abs(nk - ne) / (1.0 + nk));
    }
    r.value = worst;
    r.detail = "3 random band-limited functions";
  });
}

CheckResult check_denominator_identity() {
  return timed("denominator-identity", 1e-12, [](CheckResult& r) {
    const auto ks = momentum::momentum_grid(4096);
    double worst = 0.0;
    for (double gamma : {0.3, 1.0, 2.0, 3.7}) {
      const auto co = flux::flux_coefficients(gamma);
      for (double k : ks) {
        const double s2 = std::sin(k) * std::sin(k);
        const double q = co.c + co.b * s2 + co.a * s2 * s2;
        const double lhs =
            std::norm(scattering::spectral_denominator(gamma, k));
        worst = std::max(worst, std::abs(lhs - q) / (1.0 + q));
      }
    }
    r.value = worst;
    r.detail = "4096-point grid, 4 couplings";
  });
}

CheckResult check_interaction_inverse() {
  return timed("interaction-inverse", 1e-12, [](CheckResult& r) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double gamma = -4.0 + 8.0 * i / 49.0;
        const double e = -0.99 + 1.98 * j / 49.0;
        const scattering::Matrix4 prod = scattering::interaction_matrix(gamma, e) *
                          scattering::interaction_inverse(gamma, e);
        worst = std::max(
            worst,
            (prod - scattering::Matrix4::Identity()).cwiseAbs().maxCoeff());
      }
    r.value = worst;
    r.detail = "50x50 (gamma, e) grid";
  });
}

CheckResult check_flux_evenness() {
  return timed("flux-evenness", 1e-13, [](CheckResult& r) {
    double worst = 0.0;
    for (double gamma : {0.5, 1.7, 3.0})
      worst = std::max(worst, std::abs(flux::heat_flux(gamma, 1.0, 2.0).j -
                                       flux::heat_flux(-gamma, 1.0, 2.0).j));
    r.value = worst;
    r.detail = "gamma in {0.5, 1.7, 3}";
  });
}

std::vector<flux::FluxResult> reference_sweep(int threads) {
  std::vector<double> gammas;
  for (int i = 0; i < 161; ++i) gammas.push_back(-4.0 + 8.0 * i / 160.0);
  return flux::sweep(gammas, 1.0, 2.0, 1e-10, threads);
}

CheckResult check_flux_sandwich(const std::vector<flux::FluxResult>& rows) {
  return timed("flux-sandwich", 0.0, [&rows](CheckResult& r) {
    double excess = -1.0;
    for (const auto& row : rows) {
      excess = std::max(excess, row.lower_bound - row.j);
      excess = std::max(excess, row.j - row.upper_bound);
      excess = std::max(excess, -row.sigma);  // sigma must stay positive
      excess = std::max(excess, row.sigma - 0.5);
    }
    r.value = excess;
    r.detail = "161 sweep points, beta = (1, 2)";
  }, /*strict_less=*/true);
}

CheckResult check_flux_dominance(const std::vector<flux::FluxResult>& rows) {
  return timed("flux-dominance", 0.0, [&rows](CheckResult& r) {
    double j0 = 0.0;
    for (const auto& row : rows)
      if (row.gamma == 0.0) j0 = row.j;
    double excess = -1.0;
    for (const auto& row : rows)
      if (row.gamma != 0.0) excess = std::max(excess, row.j - j0);
    r.value = excess;
    r.detail = "free bond maximizes the flux";
  }, /*strict_less=*/true);
}

CheckResult check_sweep_determinism(const std::vector<flux::FluxResult>& rows,
                                    int threads) {
  return timed("sweep-determinism", 0.0, [&](CheckResult& r) {
    std::vector<double> gammas;
    for (const auto& row : rows) gammas.push_back(row.gamma);
    const auto serial = flux::sweep(gammas, 1.0, 2.0, 1e-10, 1);
    const auto wide = flux::sweep(gammas, 1.0, 2.0, 1e-10,
                                  std::max(threads, 2));
    double mismatches = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (serial[i].j != wide[i].j || serial[i].j != rows[i].j) mismatches += 1.0;
      if (serial[i].quad_error != wide[i].quad_error) mismatches += 1.0;
    }
    r.value = mismatches;
    r.detail = "thread counts 1 vs >=2, bitwise";
  });
}

CheckResult check_pfaffian_agreement(unsigned long long seed) {
  return timed("pfaffian-agreement", 1e-10, [seed](CheckResult& r) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int dim = 2; dim <= 10; dim += 2)
      for (int trial = 0; trial < 20; ++trial) {
        CMat a = CMat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = i + 1; j < dim; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
            a(j, i) = -a(i, j);
          }
        const Complex brute = pfaffian::pfaffian_bruteforce(a);
        const Complex fast = pfaffian::pfaffian(a);
        worst = std::max(worst,
                         std::abs(brute - fast) / (1.0 + std::abs(brute)));
      }
    r.value = worst;
    r.detail = "20 trials per even dim <= 10";
  });
}

CheckResult check_pfaffian_determinant(unsigned long long seed) {
  return timed("pfaffian-determinant", 1e-9, [seed](CheckResult& r) {
    std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbull);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int dim = 2; dim <= 20; dim += 2) {
      CMat a = CMat::Zero(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
          a(i, j) = Complex(g(rng), g(rng));
          a(j, i) = -a(i, j);
        }
      const Complex pf = pfaffian::pfaffian(a);
      const Complex det = a.determinant();
      worst = std::max(worst,
                       std::abs(pf * pf - det) / (1.0 + std::abs(det)));
    }
    r.value = worst;
    r.detail = "pf^2 = det up to dim 20";
  });
}

CheckResult check_resolvent_boundary() {
  return timed("resolvent-boundary", 1e-2, [](CheckResult& r) {
    double worst = 0.0;
    for (int x : {0, 1, 2})
      worst = std::max(
          worst, std::abs(oracle::numerical_resolvent(0.3, 1e-3, x, 10000) -
                          scattering::free_resolvent_edge(0.3, x)));
    r.value = worst;
    r.detail = "e = 0.3, eps = 1e-3, window 1e4";
  });
}

CheckResult check_resolvent_order() {
  return timed("resolvent-order", 20.0, [](CheckResult& r) {
    double coarse = 0.0, fine = 0.0;
    for (int x : {0, 1, 2}) {
      coarse = std::max(coarse,
                        std::abs(oracle::numerical_resolvent(0.3, 1e-2, x, 2000) -
                                 scattering::free_resolvent_edge(0.3, x)));
      fine = std::max(fine,
                      std::abs(oracle::numerical_resolvent(0.3, 1e-3, x, 10000) -
                               scattering::free_resolvent_edge(0.3, x)));
    }
    const double ratio = coarse / fine;
    r.value = ratio;
    r.pass = ratio >= 5.0 && ratio <= 20.0;
    r.detail = "error ratio across one decade of eps; want [5, 20]";
  });
}

CheckResult check_wave_norms() {
  return timed("wave-image-norms", 1e-8, [](CheckResult& r) {
    double worst = -1.0;
    for (double gamma : {0.3, 1.0, 2.0, 3.7})
      for (int x : {0, 1}) {
        const auto nrm =
            scattering::image_norm_sq(scattering::wave_apply(gamma, x, 0), 1e-9);
        if (!nrm.converged) worst = std::max(worst, 1.0);
        worst = std::max(worst, nrm.value - 1.0);
      }
    r.value = worst;
    r.detail = "norm excess over 1 across couplings and sites";
  });
}

CheckResult check_reconstruction() {
  return timed("flux-reconstruction", 1e-8, [](CheckResult& r) {
    const double closed = flux::heat_flux(1.3, 1.0, 2.0, 1e-12).j;
    const double rebuilt = flux::flux_from_two_point(1.3, 0, 2, 1.0, 2.0, 1e-11);
    r.value = std::abs(rebuilt - closed);
    r.detail = "boundary pair correlation vs closed form, gamma = 1.3";
  });
}

struct OracleRunPair {
  lattice::LatticeConfig cfg;
  double err_ref = 0.0;
  double err_half = 0.0;
  double first_law = 0.0;
  double j_left = 0.0;
};

}  // namespace

std::vector<CheckResult> fast_suite(unsigned long long seed, int threads) {
  std::vector<CheckResult> out;
  out.push_back(check_lattice_symmetries());
  out.push_back(check_momentum_oddness());
  out.push_back(check_momentum_isometry(seed));
  out.push_back(check_denominator_identity());
  out.push_back(check_interaction_inverse());
  out.push_back(check_flux_evenness());
  const auto rows = reference_sweep(threads);
  out.push_back(check_flux_sandwich(rows));
  out.push_back(check_flux_dominance(rows));
  out.push_back(check_sweep_determinism(rows, threads));
  out.push_back(check_pfaffian_agreement(seed));
  out.push_back(check_pfaffian_determinant(seed));
  out.push_back(check_resolvent_boundary());
  out.push_back(check_resolvent_order());
  out.push_back(check_wave_norms());
  out.push_back(check_reconstruction());
  return out;
}

std::vector<CheckResult> oracle_suite() {
  std::vector<CheckResult> out;

  // window-averaged flux vs closed form at reference and halved resolution
  const auto pairs_t0 = Clock::now();
  std::vector<OracleRunPair> pairs;
  for (auto [gamma, bl, br] :
       {std::tuple{0.0, 1.0, 2.0}, {1.0, 1.0, 2.0}, {2.0, 1.0, 2.0},
        {0.5, 0.5, 3.0}}) {
    OracleRunPair p;
    p.cfg = make_config(1, 0, gamma, bl, br, 600);
    const double closed = flux::heat_flux(gamma, bl, br, 1e-12).j;
    const auto ref = oracle::ergodic_flux(p.cfg, 200.0);
    auto half_cfg = p.cfg;
    half_cfg.trunc = 300;
    const auto half = oracle::ergodic_flux(half_cfg, 100.0);
    p.err_ref = std::abs(ref.j_left - closed);
    p.err_half = std::abs(half.j_left - closed);
    p.first_law = ref.first_law_residual;
    p.j_left = ref.j_left;
    pairs.push_back(p);
  }

  {
    CheckResult r;
    r.name = "window-average-closed";
    r.threshold = 5e-3;
    std::ostringstream detail;
    for (const auto& p : pairs) {
      r.value = std::max(r.value, p.err_ref);
      detail << "gamma=" << p.cfg.gamma << ":" << describe(p.err_ref) << " ";
    }
    r.pass = r.value <= r.threshold;
    r.detail = "trunc=600 T=200; " + detail.str();
    r.seconds = seconds_since(pairs_t0);
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "window-average-halving";
    r.threshold = 0.0;
    r.value = -1.0;
    for (const auto& p : pairs) r.value = std::max(r.value, p.err_ref - p.err_half);
    r.pass = r.value < 0.0;
    r.detail = "error grows when trunc and T are halved";
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "first-law";
    r.threshold = 1e-4;
    for (const auto& p : pairs) r.value = std::max(r.value, p.first_law);
    r.pass = r.value <= r.threshold;
    r.detail = "|J_L + J_R| at reference resolution";
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "flux-sign";
    r.threshold = 0.0;
    r.value = 1.0;
    for (const auto& p : pairs)
      if (p.cfg.beta_r > p.cfg.beta_l) r.value = std::min(r.value, p.j_left);
    r.pass = r.value > 0.0;
    r.detail = "energy flows out of the hotter reservoir";
    out.push_back(r);
  }

  {
    CheckResult r;
    r.name = "equilibrium-window";
    r.threshold = 1e-4;
    const auto t0 = Clock::now();
    const auto run =
        oracle::ergodic_flux(make_config(1, 0, 0.8, 1.2, 1.2, 400), 150.0);
    r.value = std::max(std::abs(run.j_left), std::abs(run.j_right));
    r.seconds = seconds_since(t0);
    r.pass = r.value <= r.threshold;
    r.detail = "equal temperatures, gamma = 0.8";
    out.push_back(r);
  }

  {
    CheckResult r;
    r.name = "point-spectrum-flux";
    r.threshold = 1e-10;
    const auto t0 = Clock::now();
    const auto pp = oracle::pp_flux_check(3.0, 0, 2, 400);
    const auto small = oracle::pp_flux_check(3.0, 0, 2, 200);
    r.value = pp.max_flux_element;
    r.seconds = seconds_since(t0);
    r.pass = r.value <= r.threshold && pp.bound_count == small.bound_count;
    std::ostringstream detail;
    detail << pp.bound_count << " bound states, count stable 200->400";
    r.detail = detail.str();
    out.push_back(r);
  }

  {
    CheckResult r;
    r.name = "four-point-stationarity";
    r.threshold = 1e-6;
    const auto t0 = Clock::now();
    const auto cfg = make_config(1, 0, 1.1, 1.0, 2.0, 150);
    const auto ctx = oracle::make_context(cfg);
    std::vector<CVec> f;
    for (int which = 0; which < 4; ++which) {
      CVec v = CVec::Zero(cfg.dim());
      const int site = which % 2;
      v[(which < 2 ? cfg.pidx(site) : cfg.hidx(site))] = 1.0;
      f.push_back(v);
    }
    const double t_max = 120.0;
    const int samples = 40;
    std::vector<Complex> pf(samples);
    Complex mean(0.0, 0.0);
    for (int s = 0; s < samples; ++s) {
      const double t = 0.5 * t_max + 0.5 * t_max * s / (samples - 1);
      CMat m = CMat::Zero(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          m(i, j) = oracle::evolved_two_point(ctx, t, f[i], f[j]);
      pf[s] = pfaffian::pfaffian_bruteforce(pfaffian::skew_from_upper(m));
      mean += pf[s];
    }
    mean /= double(samples);
    double var = 0.0;
    for (const auto& z : pf) var += std::norm(z - mean);
    r.value = var / samples;
    r.seconds = seconds_since(t0);
    r.pass = r.value <= r.threshold;
    r.detail = "variance of a localized 4-point function over the late window";
    out.push_back(r);
  }

  return out;
}

}  // namespace nessxy::checks
