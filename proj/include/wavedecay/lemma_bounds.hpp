#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "wavedecay/numerics.hpp"

namespace wavedecay {

// Closed-form super-solutions of  X' = -beta1(t) p(alpha1(t) X)  via the
// comparison function psi(x) = integral_x^{X0} ds / p(s):
//
//   Scaled   (needs p(x) <= x/m):
//     X(t) <= (1/alpha1(t)) psi^{-1}( A(t) ),  X0 = alpha1(0) S0,
//     A(t)  = integral_0^t alpha1 beta1 ds - m ln(alpha1(t)/alpha1(0))
//   Factored (needs p(alpha1 x) >= m p(alpha1) p(x)):
//     X(t) <= psi^{-1}( integral_0^t m p(alpha1) beta1 ds ),  X0 = S0.
//
// p must be strictly increasing with p(0) = 0; alpha1 positive non-increasing;
// beta1 >= 0. When p is a pure power c s^k, psi and its inverse are taken in
// closed form; otherwise both fall back to adaptive quadrature + bisection.

enum class BoundMode { Scaled, Factored };

struct PowerForm {
  double c = 1.0;
  double k = 1.0;
};

struct MonotoneGain {
  std::function<double(double)> f;
  std::optional<PowerForm> power;  // set when f(s) = c s^k
};

struct BoundResult {
  double value = 0.0;
  bool saturated = false;  // psi^{-1} argument beyond psi's range: bound hit 0+
};

inline MonotoneGain make_power_gain(double c, double k) {
  if (!(c > 0.0 && k > 0.0)) throw std::invalid_argument("make_power_gain: need c, k > 0");
  MonotoneGain g;
  g.f = [c, k](double s) { return c * std::pow(s, k); };
  g.power = PowerForm{c, k};
  return g;
}

namespace detail {

inline double psi_of(const MonotoneGain& p, double x, double X0) {
  if (p.power) {
    const double c = p.power->c, k = p.power->k;
    if (k == 1.0) return std::log(X0 / x) / c;
    return (std::pow(x, 1.0 - k) - std::pow(X0, 1.0 - k)) / (c * (k - 1.0));
  }
  return adaptive_simpson([&](double s) { return 1.0 / p.f(s); }, x, X0,
                          1e-12 * std::max(1.0, X0));
}

inline BoundResult psi_inverse(const MonotoneGain& p, double y, double X0) {
  if (y <= 0.0) return {X0, false};
  if (p.power) {
    const double c = p.power->c, k = p.power->k;
    if (k == 1.0) return {X0 * std::exp(-c * y), false};
    if (k > 1.0) return {std::pow(std::pow(X0, 1.0 - k) + c * (k - 1.0) * y, 1.0 / (1.0 - k)), false};
    const double base = std::pow(X0, 1.0 - k) - c * (1.0 - k) * y;
    if (base <= 0.0) return {0.0, true};  // psi is bounded for sublinear p
    return {std::pow(base, 1.0 / (1.0 - k)), false};
  }
  // expand the lower bracket until psi(lo) >= y, then bisect
  double hi = X0, lo = X0;
  for (int j = 0; j < 1024; ++j) {
    lo *= 0.5;
    if (lo < 1e-300) return {0.0, true};
    if (psi_of(p, lo, X0) >= y) break;
    hi = lo;
  }
  auto f = [&](double x) { return -psi_of(p, x, X0); };  // increasing in x
  return {bisect_increasing(f, -y, lo, hi, 1e-13, 200), false};
}

}  // namespace detail

inline BoundResult closed_form_bound(const MonotoneGain& p,
                                     const std::function<double(double)>& alpha1,
                                     const std::function<double(double)>& beta1, double m,
                                     double S0, double t, BoundMode mode) {
  if (!(m > 0.0)) throw std::invalid_argument("closed_form_bound: need m > 0");
  if (!(S0 > 0.0)) throw std::invalid_argument("closed_form_bound: need S0 > 0");
  if (!(t >= 0.0)) throw std::domain_error("closed_form_bound: need t >= 0");
  const double a0 = alpha1(0.0);
  if (!(a0 > 0.0)) throw std::invalid_argument("closed_form_bound: need alpha1(0) > 0");

  if (mode == BoundMode::Scaled) {
    const double X0 = a0 * S0;
    const double at = alpha1(t);
    double A = -m * std::log(at / a0);
    if (t > 0.0)
      A += adaptive_simpson_segmented([&](double s) { return alpha1(s) * beta1(s); }, 0.0, t,
                                      1e-11);
    BoundResult r = detail::psi_inverse(p, A, X0);
    r.value /= at;
    return r;
  }
  const double X0 = S0;
  double A = 0.0;
  if (t > 0.0)
    A = adaptive_simpson_segmented([&](double s) { return m * p.f(alpha1(s)) * beta1(s); },
                                   0.0, t, 1e-11);
  return detail::psi_inverse(p, A, X0);
}

}  // namespace wavedecay
