#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "nessxy/lattice.hpp"
#include "nessxy/pfaffian.hpp"

using namespace nessxy;
using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;

namespace {

CMat random_skew(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat a = CMat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      a(i, j) = Complex(g(rng), g(rng));
      a(j, i) = -a(i, j);
    }
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("pfaffian");

TEST_CASE("small closed forms") {
  CMat a2 = CMat::Zero(2, 2);
  a2(0, 1) = Complex(3.0, -1.0);
  a2(1, 0) = -a2(0, 1);
  CHECK(std::abs(pfaffian::pfaffian_bruteforce(a2) - a2(0, 1)) == 0.0);
  CHECK(std::abs(pfaffian::pfaffian(a2) - a2(0, 1)) <= 1e-15);

  std::mt19937_64 rng(5);
  const CMat a4 = random_skew(4, rng);
  const Complex want =
      a4(0, 1) * a4(2, 3) - a4(0, 2) * a4(1, 3) + a4(0, 3) * a4(1, 2);
  CHECK(std::abs(pfaffian::pfaffian_bruteforce(a4) - want) <= 1e-14);
  CHECK(std::abs(pfaffian::pfaffian(a4) - want) <= 1e-13);

  CHECK(pfaffian::pfaffian(CMat::Zero(0, 0)) == Complex(1.0, 0.0));
}

TEST_CASE("elimination agrees with the pairing sum") {
  std::mt19937_64 rng(17);
  for (int dim = 2; dim <= 10; dim += 2)
    for (int trial = 0; trial < 50; ++trial) {
      const CMat a = random_skew(dim, rng);
      const Complex brute = pfaffian::pfaffian_bruteforce(a);
      const Complex fast = pfaffian::pfaffian(a);
      CHECK(std::abs(brute - fast) <= 1e-10 * (1.0 + std::abs(brute)));
    }
}

TEST_CASE("pfaffian squared is the determinant") {
  std::mt19937_64 rng(23);
  for (int dim = 2; dim <= 20; dim += 2) {
    const CMat a = random_skew(dim, rng);
    const Complex pf = pfaffian::pfaffian(a);
    const Complex det = a.determinant();
    CHECK(std::abs(pf * pf - det) <= 1e-9 * (1.0 + std::abs(det)));
  }
}

TEST_CASE("congruence and structure rules") {
  std::mt19937_64 rng(31);
  const CMat a = random_skew(6, rng);
  const Complex pf = pfaffian::pfaffian(a);

  // simultaneous row/column swap flips the sign
  CMat b = a;
  b.row(1).swap(b.row(4));
  b.col(1).swap(b.col(4));
  CHECK(std::abs(pfaffian::pfaffian(b) + pf) <= 1e-12 * (1.0 + std::abs(pf)));

  // scaling by c multiplies by c^{dim/2}
  CHECK(std::abs(pfaffian::pfaffian(CMat(2.0 * a)) - 8.0 * pf) <=
        1e-11 * (1.0 + std::abs(pf)));

  // block diagonal multiplies
  const CMat c = random_skew(4, rng);
  CMat blk = CMat::Zero(10, 10);
  blk.topLeftCorner(6, 6) = a;
  blk.bottomRightCorner(4, 4) = c;
  const Complex want = pf * pfaffian::pfaffian(c);
  CHECK(std::abs(pfaffian::pfaffian(blk) - want) <=
        1e-11 * (1.0 + std::abs(want)));

  // rank-two skew matrix of dimension >= 4 is singular
  CVec u = CVec::Random(6), v = CVec::Random(6);
  const CMat low = u * v.transpose() - v * u.transpose();
  CHECK(std::abs(pfaffian::pfaffian(low)) <= 1e-12);

  // zero row forces a zero pfaffian
  CMat zr = a;
  zr.row(2).setZero();
  zr.col(2).setZero();
  CHECK(pfaffian::pfaffian(zr) == Complex(0.0, 0.0));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS((void)pfaffian::pfaffian(CMat::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pfaffian::pfaffian(CMat::Zero(2, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pfaffian::pfaffian_bruteforce(CMat::Zero(14, 14)),
                  std::invalid_argument);
}

TEST_CASE("real scalar path") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  Mat a = Mat::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      a(i, j) = g(rng);
      a(j, i) = -a(i, j);
    }
  const double pf = pfaffian::pfaffian(a);
  CHECK(std::abs(pf * pf - a.determinant()) <=
        1e-10 * (1.0 + std::abs(a.determinant())));
}

namespace {

lattice::LatticeConfig quasifree_config() {
  lattice::LatticeConfig cfg;
  cfg.n = 2;
  cfg.a = 0;
  cfg.gamma = 0.0;
  cfg.beta_l = 0.8;
  cfg.beta_r = 1.9;
  cfg.trunc = 6;
  return cfg;
}

CVec random_doubled(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec f(dim);
  for (int i = 0; i < dim; ++i) f[i] = Complex(g(rng), g(rng));
  return f;
}

}  // namespace

TEST_CASE("two-point function of the quasifree state") {
  const auto cfg = quasifree_config();
  const CMat s = lattice::initial_two_point(cfg);
  std::mt19937_64 rng(51);
  const CVec f = random_doubled(cfg.dim(), rng);
  const CVec g = random_doubled(cfg.dim(), rng);

  const Complex two = pfaffian::quasifree_2m_point({f, g}, s);
  const CVec gf = lattice::gamma_apply(f);
  const Complex direct = gf.dot(s * g);
  CHECK(std::abs(two - direct) <= 1e-12 * (1.0 + std::abs(direct)));
}

TEST_CASE("canonical anticommutation rule in the state") {
  const auto cfg = quasifree_config();
  const CMat s = lattice::initial_two_point(cfg);
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const CVec f = random_doubled(cfg.dim(), rng);
    const CVec g = random_doubled(cfg.dim(), rng);
    const Complex fg = pfaffian::quasifree_2m_point({f, g}, s);
    const Complex gf = pfaffian::quasifree_2m_point({g, f}, s);
    const Complex pairing = lattice::gamma_apply(f).dot(g);
    CHECK(std::abs(fg + gf - pairing) <= 1e-11 * (1.0 + std::abs(pairing)));
  }
}

TEST_CASE("four-point function matches the pairing sum") {
  const auto cfg = quasifree_config();
  const CMat s = lattice::initial_two_point(cfg);
  std::mt19937_64 rng(63);
  std::vector<CVec> f;
  for (int i = 0; i < 4; ++i) f.push_back(random_doubled(cfg.dim(), rng));

  const Complex got = pfaffian::quasifree_2m_point(f, s);

  CMat m = CMat::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      m(i, j) = lattice::gamma_apply(f[i]).dot(s * f[j]);
    }
  // antisymmetrized upper triangle, then the small oracle
  CMat skew = CMat::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      skew(i, j) = m(i, j);
      skew(j, i) = -m(i, j);
    }
  const Complex want = pfaffian::pfaffian_bruteforce(skew);
  CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
  CHECK_THROWS_AS((void)pfaffian::quasifree_2m_point({f[0]}, s),
                  std::invalid_argument);
}

TEST_SUITE_END();
