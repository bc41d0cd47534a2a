#pragma once

// Adaptive 1D quadrature used by the covariance and extension oracles.
// Failures are reported through the `converged` flag, never silently.

#include <cmath>
#include <stdexcept>

namespace weldlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // accumulated local error estimate
  bool converged = true;
  int max_depth_hit = 0;
};

namespace detail {

template <typename F>
void adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth, int max_depth, QuadResult& out) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= max_depth) {
    out.converged = false;
    out.max_depth_hit = depth;
    out.value += left + right;
    out.error += std::abs(delta);
    return;
  }
  if (std::abs(delta) <= 15.0 * tol) {
    out.value += left + right + delta / 15.0;
    out.error += std::abs(delta) / 15.0;
    return;
  }
  adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, out);
  adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

/** Adaptive Simpson rule on [a,b] with absolute tolerance tol. */
template <typename F>
QuadResult adaptive_simpson(const F& f, double a, double b, double tol = 1e-12,
                            int max_depth = 48) {
  if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: a > b");
  QuadResult out;
  if (a == b) return out;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, max_depth, out);
  return out;
}

}  // namespace weldlab
