#pragma once
// Pfaffians of skew-symmetric matrices and quasifree 2m-point functions.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace nessxy::pfaffian {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr int kBruteForceMaxDim = 12;

namespace detail {

inline void require_even_square(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols) throw std::invalid_argument("pfaffian: matrix must be square");
  if (rows % 2 != 0) throw std::invalid_argument("pfaffian: dimension must be even");
}

// Number of crossings of a perfect matching given as (p_i, q_i) with
// p_1 < p_2 < ... and p_i < q_i.
inline int crossing_count(const std::vector<std::pair<int, int>>& pairs) {
  int c = 0;
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = i + 1; j < pairs.size(); ++j)
      if (pairs[j].first < pairs[i].second && pairs[i].second < pairs[j].second) ++c;
  return c;
}

// Parity of the permutation (p_1 q_1 p_2 q_2 ...) via inversion count.
inline int inversion_parity(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> flat;
  flat.reserve(2 * pairs.size());
  for (auto& pq : pairs) {
    flat.push_back(pq.first);
    flat.push_back(pq.second);
  }
  int inv = 0;
  for (size_t i = 0; i < flat.size(); ++i)
    for (size_t j = i + 1; j < flat.size(); ++j)
      if (flat[i] > flat[j]) ++inv;
  return inv % 2;
}

template <class Scalar, class Mat>
void enumerate_pairings(const Mat& A, std::vector<bool>& used,
                        std::vector<std::pair<int, int>>& pairs, Scalar& acc) {
  const int dim = static_cast<int>(A.rows());
  int first = -1;
  for (int i = 0; i < dim; ++i)
    if (!used[i]) {
      first = i;
      break;
    }
  if (first < 0) {
    const int cross = crossing_count(pairs);
    const int invp = inversion_parity(pairs);
    if (cross % 2 != invp)
      throw std::logic_error("pfaffian: crossing sign disagrees with permutation parity");
    Scalar term = (cross % 2 == 0) ? Scalar(1) : Scalar(-1);
    for (auto& pq : pairs) term *= A(pq.first, pq.second);
    acc += term;
    return;
  }
  used[first] = true;
  for (int j = first + 1; j < dim; ++j) {
    if (used[j]) continue;
    used[j] = true;
    pairs.emplace_back(first, j);
    enumerate_pairings(A, used, pairs, acc);
    pairs.pop_back();
    used[j] = false;
  }
  used[first] = false;
}

}  // namespace detail

// Sum over perfect matchings with the crossing-number sign, cross-checked
// against the permutation parity.  Intended as an oracle for small dimensions.
template <class Derived>
typename Derived::Scalar pfaffian_bruteforce(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  detail::require_even_square(A.rows(), A.cols());
  if (A.rows() > kBruteForceMaxDim)
    throw std::invalid_argument("pfaffian_bruteforce: dimension above 12");
  if (A.rows() == 0) return Scalar(1);
  std::vector<bool> used(A.rows(), false);
  std::vector<std::pair<int, int>> pairs;
  Scalar acc(0);
  const auto& M = A.derived();
  detail::enumerate_pairings(M, used, pairs, acc);
  return acc;
}

// Skew-symmetric elimination (congruence by unit triangular transforms) with
// column pivoting; O(m^3).  A column whose magnitude falls below
// rel_pivot_tol times the largest initial entry makes the Pfaffian zero.
template <class Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& A_in,
                                  double rel_pivot_tol = 1e-13) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require_even_square(A_in.rows(), A_in.cols());
  const Eigen::Index dim = A_in.rows();
  if (dim == 0) return Scalar(1);

  Mat A = A_in.derived();
  const double scale = A.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Scalar(0);

  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < dim; k += 2) {
    // pivot: move the largest entry of column k below the diagonal to row k+1
    Eigen::Index piv = k + 1;
    double best = std::abs(A(k + 1, k));
    for (Eigen::Index i = k + 2; i < dim; ++i) {
      const double v = std::abs(A(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= rel_pivot_tol * scale) return Scalar(0);
    if (piv != k + 1) {
      A.row(piv).swap(A.row(k + 1));
      A.col(piv).swap(A.col(k + 1));
      pf = -pf;
    }
    pf *= A(k, k + 1);
    const Eigen::Index rest = dim - k - 2;
    if (rest > 0) {
      // zero out A(k, j) for j >= k+2 by adding multiples of row/col k+1
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coef =
          A.row(k).segment(k + 2, rest).transpose() / A(k, k + 1);
      A.block(k + 2, 0, rest, dim) -= coef * A.row(k + 1);
      A.block(0, k + 2, dim, rest) -= A.col(k + 1) * coef.transpose();
    }
  }
  return pf;
}

// Fills the strict lower triangle from the negated upper one; the diagonal
// is forced to zero.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
skew_from_upper(const Eigen::MatrixBase<Derived>& U) {
  detail::require_even_square(U.rows(), U.cols());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> A = U.derived();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    A(i, i) = typename Derived::Scalar(0);
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = -A(j, i);
  }
  return A;
}

namespace detail {

// The antiunitary block swap of the doubled space on vectors.
inline CVec block_swap_conj(const CVec& f) {
  const Eigen::Index s = f.size() / 2;
  CVec out(f.size());
  out.head(s) = f.tail(s).conjugate();
  out.tail(s) = f.head(s).conjugate();
  return out;
}

}  // namespace detail

// 2m-point function of the quasifree state with two-point operator S:
// the Pfaffian of M_ij = <Gamma F_i, S F_j> antisymmetrized from i < j.
// Vectors live on the doubled space (even dimension, particle block first).
inline Complex quasifree_2m_point(const std::vector<CVec>& F, const CMat& S) {
  if (F.size() % 2 != 0)
    throw std::invalid_argument("quasifree_2m_point: need an even number of vectors");
  const Eigen::Index m = static_cast<Eigen::Index>(F.size());
  for (const auto& f : F)
    if (f.size() != S.rows() || f.size() % 2 != 0)
      throw std::invalid_argument("quasifree_2m_point: vector/operator size mismatch");
  CMat M = CMat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const CVec gf = detail::block_swap_conj(F[i]);
    for (Eigen::Index j = i + 1; j < m; ++j) M(i, j) = gf.dot(S * F[j]);
  }
  return pfaffian(skew_from_upper(M));
}

}  // namespace nessxy::pfaffian
