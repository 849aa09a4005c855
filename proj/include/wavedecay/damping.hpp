#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "wavedecay/numerics.hpp"
#include "wavedecay/validation.hpp"

namespace wavedecay {

// A scalar feedback g: R -> R, odd, monotone non-decreasing, g(0) = 0.
// Near the origin (|y| <= eta0) each family follows its defining formula;
// beyond eta0 it continues linearly with the slope attained at eta0, so the
// standard linear bounds y^2/m <= g(y)y <= m y^2 hold at infinity.
//
// The concave majorant h0 enters through its convex inverse: h0_inverse is
// given in closed form on [0,1] and h0 itself is recovered analytically or by
// bisection. Each inverse is built so that h0(g(y)y) >= eps0 (g(y)^2 + y^2)
// near the origin with an explicitly computable eps0.

enum class DampingFamily { Linear, SuperlinearPower, SublinearPower, ExponentialOrigin };

// Origin behavior classes: linearly bounded two-sided (AO1-type), bounded
// above by m0 y^2 (superlinear, AO2-type), bounded below by y^2/m0
// (sublinear, AO3-type).
enum class OriginBehavior { LinearlyBounded, Superlinear, Sublinear };

struct DampingLaw {
  DampingFamily family = DampingFamily::Linear;
  double exponent = 1.0;  // r0 > 1 (superlinear) or theta0 in (0,1) (sublinear)

  double m0 = 1.0;    // near-origin bound constant (>= 1)
  double eta = 1.0;   // radius of the origin interval I = [-eta, eta]
  double eta0 = 1.0;  // threshold where the linear tail takes over
  double m = 1.0;     // infinity bound constant
  double eps0 = 0.5;  // constant in h0(g(y)y) >= eps0 (g^2 + y^2) on |y| < eta0

  // linear tail data: g(y) = g_edge + g_slope (y - eta0) for y > eta0 (odd)
  double g_edge = 1.0;
  double g_slope = 1.0;

  // h0 domain end x1 = h0_inverse(1) and the terminal slope used to extend
  // h0 linearly beyond x1
  double h0_max_x = 1.0;
  double h0_end_slope = 1.0;
};

inline OriginBehavior origin_behavior(const DampingLaw& law) {
  switch (law.family) {
    case DampingFamily::Linear:
      return OriginBehavior::LinearlyBounded;
    case DampingFamily::SuperlinearPower:
    case DampingFamily::ExponentialOrigin:
      return OriginBehavior::Superlinear;
    case DampingFamily::SublinearPower:
      return OriginBehavior::Sublinear;
  }
  throw std::logic_error("origin_behavior: unreachable");
}

namespace detail {

// family formula for g on [0, eta0], positive branch
inline double g_core(const DampingLaw& law, double y) {
  switch (law.family) {
    case DampingFamily::Linear:
      return y;
    case DampingFamily::SuperlinearPower:
      return std::pow(y, law.exponent);
    case DampingFamily::SublinearPower:
      return std::pow(y, law.exponent);
    case DampingFamily::ExponentialOrigin:
      return y > 0.0 ? y * std::exp(-1.0 / (y * y)) : 0.0;
  }
  throw std::logic_error("g_core: unreachable");
}

inline double g_core_prime(const DampingLaw& law, double y) {
  switch (law.family) {
    case DampingFamily::Linear:
      return 1.0;
    case DampingFamily::SuperlinearPower:
    case DampingFamily::SublinearPower:
      return y > 0.0 ? law.exponent * std::pow(y, law.exponent - 1.0)
                     : (law.exponent > 1.0 ? 0.0
                                           : std::numeric_limits<double>::infinity());
    case DampingFamily::ExponentialOrigin:
      return y > 0.0 ? std::exp(-1.0 / (y * y)) * (1.0 + 2.0 / (y * y)) : 0.0;
  }
  throw std::logic_error("g_core_prime: unreachable");
}

}  // namespace detail

inline double eval_g(const DampingLaw& law, double y) {
  if (!std::isfinite(y)) throw std::domain_error("eval_g: non-finite input");
  const double a = std::abs(y);
  const double v = a <= law.eta0 ? detail::g_core(law, a)
                                 : law.g_edge + law.g_slope * (a - law.eta0);
  return y < 0.0 ? -v : v;
}

// derivative of g at |y| (even function); may be +inf at 0 for sublinear laws
inline double g_prime(const DampingLaw& law, double y) {
  const double a = std::abs(y);
  return a <= law.eta0 ? detail::g_core_prime(law, a) : law.g_slope;
}

// h0_inverse on [0,1]: the paper-supplied convex inverses
inline double h0_inverse(const DampingLaw& law, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("h0_inverse: s outside [0,1]");
  switch (law.family) {
    case DampingFamily::Linear:
      return s;
    case DampingFamily::SuperlinearPower:
      return std::pow(s, 0.5 * (1.0 + law.exponent));
    case DampingFamily::SublinearPower:
      return std::pow(s, 0.5 * (1.0 + law.exponent) / law.exponent);
    case DampingFamily::ExponentialOrigin:
      return s > 0.0 ? s * std::exp(-1.0 / s) : 0.0;
  }
  throw std::logic_error("h0_inverse: unreachable");
}

// h0 on [0, h0_inverse(1)]; analytic where the inverse is a pure power,
// bisection otherwise
inline double h0(const DampingLaw& law, double x) {
  if (!(x >= 0.0)) throw std::domain_error("h0: negative input");
  if (x > law.h0_max_x * (1.0 + 1e-12))
    throw std::range_error("h0: x above h0_inverse(1); use h0_extended");
  switch (law.family) {
    case DampingFamily::Linear:
      return x;
    case DampingFamily::SuperlinearPower:
      return std::pow(x, 2.0 / (1.0 + law.exponent));
    case DampingFamily::SublinearPower:
      return std::pow(x, 2.0 * law.exponent / (1.0 + law.exponent));
    case DampingFamily::ExponentialOrigin: {
      if (x == 0.0) return 0.0;
      auto f = [&](double s) { return s * std::exp(-1.0 / s); };
      return bisect_increasing(f, x, 0.0, 1.0, 1e-15, 200);
    }
  }
  throw std::logic_error("h0: unreachable");
}

// h0 with the linear continuation past h0_inverse(1) (terminal slope)
inline double h0_extended(const DampingLaw& law, double x) {
  if (!(x >= 0.0)) throw std::domain_error("h0_extended: negative input");
  if (x <= law.h0_max_x) return h0(law, x);
  return 1.0 + law.h0_end_slope * (x - law.h0_max_x);
}

namespace detail {

// ratio minimized to obtain eps0; for every built-in family it is monotone
// decreasing in y, so the infimum over |y| < eta0 is the endpoint value
inline double majorant_ratio(const DampingLaw& law, double y) {
  const double g = eval_g(law, y);
  const double gy = g * y;
  const double denom = g * g + y * y;
  // at the origin the ratio tends to 1 for every family; g*y == 0 with y != 0
  // means g(y)y underflowed (exp-origin near 0), where the true ratio is ~1
  if (denom == 0.0 || gy == 0.0) return 1.0;
  return h0_extended(law, gy) / denom;
}

inline void finalize_constants(DampingLaw& law) {
  law.g_edge = detail::g_core(law, law.eta0);
  law.g_slope = detail::g_core_prime(law, law.eta0);
  // infinity constant: on the linear tail g(y)/y is monotone between
  // g_edge/eta0 and g_slope, so both chord and tangent slopes bound it
  const double chord = law.g_edge / law.eta0;
  law.m = std::max(std::max(chord, 1.0 / chord),
                   std::max(law.g_slope, 1.0 / law.g_slope));
  law.h0_max_x = h0_inverse(law, 1.0);
  switch (law.family) {
    case DampingFamily::Linear:
      law.h0_end_slope = 1.0;
      break;
    case DampingFamily::SuperlinearPower:
      law.h0_end_slope = 2.0 / (1.0 + law.exponent);
      break;
    case DampingFamily::SublinearPower:
      law.h0_end_slope = 2.0 * law.exponent / (1.0 + law.exponent);
      break;
    case DampingFamily::ExponentialOrigin:
      // slope of h0 at x1 = 1/ (h0_inverse)'(1) = 1 / (2/e) = e/2
      law.h0_end_slope = 0.5 * std::exp(1.0);
      break;
  }
  // sampled minimization of the majorant ratio over (0, eta0], endpoint included
  double lo = 1.0;
  const int n = 4096;
  for (int i = 1; i <= n; ++i) {
    const double y = law.eta0 * static_cast<double>(i) / n;
    lo = std::min(lo, detail::majorant_ratio(law, y));
  }
  law.eps0 = lo;
}

}  // namespace detail

inline DampingLaw make_linear_law() {
  DampingLaw law;
  law.family = DampingFamily::Linear;
  law.exponent = 1.0;
  detail::finalize_constants(law);
  return law;
}

inline DampingLaw make_superlinear_law(double r0) {
  if (!(r0 > 1.0)) throw std::invalid_argument("make_superlinear_law: need r0 > 1");
  DampingLaw law;
  law.family = DampingFamily::SuperlinearPower;
  law.exponent = r0;
  detail::finalize_constants(law);
  return law;
}

inline DampingLaw make_sublinear_law(double theta0) {
  if (!(theta0 > 0.0 && theta0 < 1.0))
    throw std::invalid_argument("make_sublinear_law: need theta0 in (0,1)");
  DampingLaw law;
  law.family = DampingFamily::SublinearPower;
  law.exponent = theta0;
  detail::finalize_constants(law);
  return law;
}

inline DampingLaw make_exp_origin_law() {
  DampingLaw law;
  law.family = DampingFamily::ExponentialOrigin;
  law.exponent = 1.0;
  detail::finalize_constants(law);
  return law;
}

inline std::string family_name(DampingFamily f) {
  switch (f) {
    case DampingFamily::Linear:
      return "linear";
    case DampingFamily::SuperlinearPower:
      return "superlinear";
    case DampingFamily::SublinearPower:
      return "sublinear";
    case DampingFamily::ExponentialOrigin:
      return "exp-origin";
  }
  return "?";
}

// ---- generic sampled property checks (reused by validate_law and by tests
//      that probe externally supplied feedbacks) ----

template <class F>
CheckResult check_monotone(F f, double lo, double hi, int n, std::string name = "monotone") {
  double worst = std::numeric_limits<double>::infinity();
  double prev = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / n;
    const double cur = f(y);
    worst = std::min(worst, cur - prev);
    prev = cur;
  }
  return {std::move(name), worst >= -1e-12, worst};
}

template <class F>
CheckResult check_sign_condition(F f, double lo, double hi, int n) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / n;
    worst = std::min(worst, f(y) * y);
  }
  return {"sign_condition", worst >= -1e-15, worst};
}

inline ValidationReport validate_law(const DampingLaw& law, int n_samples = 512) {
  if (n_samples < 100) throw std::invalid_argument("validate_law: need n_samples >= 100");
  ValidationReport rep;
  auto g = [&](double y) { return eval_g(law, y); };

  rep.checks.push_back({"g_zero_at_origin", eval_g(law, 0.0) == 0.0, std::abs(eval_g(law, 0.0))});
  rep.checks.push_back(check_monotone(g, -10.0, 10.0, 4 * n_samples, "g_monotone"));
  rep.checks.push_back(check_sign_condition(g, -10.0, 10.0, 4 * n_samples));

  {  // oddness, exact in floating point by construction
    double worst = 0.0;
    for (int i = 1; i <= n_samples; ++i) {
      const double y = 10.0 * static_cast<double>(i) / n_samples;
      worst = std::max(worst, std::abs(eval_g(law, -y) + eval_g(law, y)));
    }
    rep.checks.push_back({"g_odd", worst == 0.0, worst});
  }

  {  // y^2/m <= g(y) y <= m y^2 for |y| >= eta0, normalized by y^2
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_samples; ++i) {
      const double y = law.eta0 + (10.0 - law.eta0) * static_cast<double>(i) / n_samples;
      const double gy = eval_g(law, y) * y;
      worst = std::min(worst, std::min(law.m * y * y - gy, gy - y * y / law.m) / (y * y));
    }
    rep.checks.push_back({"infinity_bounds", worst >= -1e-12, worst});
  }

  {  // origin-class bound with m0 on I = [-eta, eta], normalized by y^2
    const OriginBehavior ob = origin_behavior(law);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n_samples; ++i) {
      const double y = law.eta * static_cast<double>(i) / n_samples;
      const double gy = eval_g(law, y) * y;
      double slack = std::numeric_limits<double>::infinity();
      if (ob != OriginBehavior::Sublinear)  // upper bound g(y) y <= m0 y^2
        slack = std::min(slack, (law.m0 * y * y - gy) / (y * y));
      if (ob != OriginBehavior::Superlinear)  // lower bound g(y) y >= y^2/m0
        slack = std::min(slack, (gy - y * y / law.m0) / (y * y));
      worst = std::min(worst, slack);
    }
    rep.checks.push_back({"origin_class_bounds", worst >= -1e-12, worst});
  }

  rep.checks.push_back({"h0_zero_at_origin", h0(law, 0.0) == 0.0, h0(law, 0.0)});
  rep.checks.push_back(check_monotone([&](double x) { return h0_extended(law, x); }, 0.0,
                                      2.0 * law.h0_max_x, n_samples, "h0_monotone"));

  {  // midpoint concavity of the extended h0
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double x1 = 2.0 * law.h0_max_x * static_cast<double>(i) / n_samples;
      const double x2 = 2.0 * law.h0_max_x * static_cast<double>(i + 1) / n_samples;
      const double mid = h0_extended(law, 0.5 * (x1 + x2));
      const double chord = 0.5 * (h0_extended(law, x1) + h0_extended(law, x2));
      worst = std::min(worst, mid - chord);
    }
    rep.checks.push_back({"h0_concave", worst >= -1e-12, worst});
  }

  {  // h0(g(y) y) >= eps0 (g(y)^2 + y^2) on 0 < |y| < eta0
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n_samples; ++i) {
      const double y = law.eta0 * static_cast<double>(i) / n_samples;
      worst = std::min(worst, detail::majorant_ratio(law, y) - law.eps0);
    }
    rep.checks.push_back({"h0_majorant_bound", worst >= -1e-12, worst});
  }

  return rep;
}

}  // namespace wavedecay
