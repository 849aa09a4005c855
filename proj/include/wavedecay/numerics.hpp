#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wavedecay {

// Root of a strictly increasing f on a bracket [lo, hi] with f(lo) <= 0 <= f(hi).
// Newton iteration safeguarded by bisection: any Newton step that leaves the
// current bracket, or a non-finite/zero derivative, falls back to the midpoint.
// Stops when |f| <= ftol.
template <class F, class DF>
double newton_bisection(F f, DF df, double lo, double hi, double x0, double ftol,
                        int max_iter = 100) {
  double x = x0;
  if (!(x >= lo && x <= hi)) x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fx) <= ftol) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double d = df(x);
    double xn = x - fx / d;
    if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    if (xn == x) return x;  // bracket exhausted at machine precision
    x = xn;
    fx = f(x);
  }
  if (std::abs(fx) <= ftol) return x;
  throw std::runtime_error("newton_bisection: no convergence within iteration cap");
}

// Inverse of a strictly increasing f by pure bisection on [lo, hi].
// Terminates on relative bracket width; assumes f(lo) <= target <= f(hi).
template <class F>
double bisect_increasing(F f, double target, double lo, double hi,
                         double rel_tol = 1e-13, int max_iter = 200) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= rel_tol * (std::abs(hi) + std::abs(lo)) + 1e-300) break;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with Richardson acceptance test.
// `tol` is an absolute tolerance on the integral.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// Composite wrapper: integrates in segments so widely varying scales
// (e.g. dyadic windows of a slowly decaying integrand) stay resolved.
template <class F>
double adaptive_simpson_segmented(F f, double a, double b, double rel_tol,
                                  int segments = 8) {
  if (a == b) return 0.0;
  double coarse = 0.0;
  const double step = (b - a) / segments;
  for (int k = 0; k < segments; ++k)
    coarse += std::abs(adaptive_simpson(f, a + k * step, a + (k + 1) * step,
                                        std::numeric_limits<double>::infinity(), 0));
  const double tol = rel_tol * (coarse > 0.0 ? coarse : 1.0);
  double total = 0.0;
  for (int k = 0; k < segments; ++k)
    total += adaptive_simpson(f, a + k * step, a + (k + 1) * step, tol / segments);
  return total;
}

}  // namespace wavedecay
