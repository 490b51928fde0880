#pragma once
// Adaptive panel quadrature on a fixed 15-point Gauss-Legendre kernel.
// Nodes are interior, so integrands may be singular at panel endpoints.

#include <cmath>
#include <complex>
#include <cstdint>
#include <type_traits>
#include <utility>

namespace nessxy::quad {

inline constexpr int kDefaultMaxDepth = 40;

// Gauss-Legendre abscissae/weights on [-1,1], positive half; x=0 is self-paired.
inline constexpr double kGlNode[8] = {
    0.0,
    0.20119409399743452230,
    0.39415134707756336989,
    0.57097217260853884754,
    0.72441773136017004742,
    0.84820658341042721620,
    0.93727339240070590431,
    0.98799251802048542849,
};
inline constexpr double kGlWeight[8] = {
    0.20257824192556127288,
    0.19843148532711157646,
    0.18616100001556221103,
    0.16626920581699393355,
    0.13957067792615431445,
    0.10715922046717193501,
    0.07036604748810812471,
    0.03075324199611726835,
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;   // accumulated panel-refinement estimate
  bool converged = true;
  long panels = 0;
};

template <class T, class F>
T gauss15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T acc = kGlWeight[0] * f(c);
  for (int i = 1; i < 8; ++i)
    acc += kGlWeight[i] * (f(c + h * kGlNode[i]) + f(c - h * kGlNode[i]));
  return h * acc;
}

namespace detail {

template <class T, class F>
void adapt(F& f, double a, double b, const T& whole, double tol, int depth,
           int max_depth, Result<T>& out) {
  const double m = 0.5 * (a + b);
  const T left = gauss15<T>(f, a, m);
  const T right = gauss15<T>(f, m, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth >= max_depth) {
    out.value += left + right;
    out.error += diff;
    out.panels += 2;
    if (diff > tol) out.converged = false;
    return;
  }
  adapt(f, a, m, left, 0.5 * tol, depth + 1, max_depth, out);
  adapt(f, m, b, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

// Integrates f over [a,b] to absolute tolerance abs_tol by panel bisection.
// Works for real- and complex-valued integrands.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol,
               int max_depth = kDefaultMaxDepth) {
  using T = std::remove_cvref_t<std::invoke_result_t<F&, double>>;
  Result<T> out;
  if (a == b) return out;
  const T whole = gauss15<T>(f, a, b);
  detail::adapt(f, a, b, whole, abs_tol, 0, max_depth, out);
  return out;
}

// Integrates over a union of intervals, splitting the tolerance evenly.
template <class F>
auto integrate_intervals(F&& f, const std::pair<double, double>* iv, int count,
                         double abs_tol, int max_depth = kDefaultMaxDepth) {
  using T = std::remove_cvref_t<std::invoke_result_t<F&, double>>;
  Result<T> out;
  for (int i = 0; i < count; ++i) {
    auto part = integrate(f, iv[i].first, iv[i].second, abs_tol / count, max_depth);
    out.value += part.value;
    out.error += part.error;
    out.panels += part.panels;
    out.converged = out.converged && part.converged;
  }
  return out;
}

}  // namespace nessxy::quad
