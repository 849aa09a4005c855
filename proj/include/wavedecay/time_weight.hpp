#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wavedecay/validation.hpp"

namespace wavedecay {

// Time weight rho multiplying the damping term: rho(t) = (1+t)^tau or rho = 1.
// Normalized so rho(0) = 1. The derived constants follow the role the weight
// plays in the envelope construction:
//   C0:      tightest constant with |rho'(t)| <= C0 rho(t)  (|tau| for powers)
//   c0, t0:  for increasing weights, rho(t - 2T) >= c0 rho(t) for t >= t0

enum class WeightFamily { PowerLaw, Constant };
enum class Monotonicity { Decreasing, Increasing };

struct TimeWeight {
  WeightFamily family = WeightFamily::Constant;
  double tau = 0.0;
  Monotonicity monotone = Monotonicity::Decreasing;
  double C0 = 0.0;
};

inline TimeWeight make_power_weight(double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("make_power_weight: non-finite tau");
  TimeWeight w;
  w.family = WeightFamily::PowerLaw;
  w.tau = tau;
  w.monotone = tau > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
  w.C0 = std::abs(tau);
  return w;
}

inline TimeWeight make_constant_weight() {
  TimeWeight w;
  w.family = WeightFamily::Constant;
  w.tau = 0.0;
  w.monotone = Monotonicity::Decreasing;  // treated with the decreasing branch
  w.C0 = 0.0;
  return w;
}

inline double eval_rho(const TimeWeight& w, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("eval_rho: need finite t >= 0");
  if (w.family == WeightFamily::Constant) return 1.0;
  return std::pow(1.0 + t, w.tau);
}

inline double rho_prime(const TimeWeight& w, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("rho_prime: need finite t >= 0");
  if (w.family == WeightFamily::Constant) return 0.0;
  return w.tau * std::pow(1.0 + t, w.tau - 1.0);
}

// alpha(t): 1 for non-increasing weights, rho(t+T)^{-2} for increasing ones
inline double alpha(const TimeWeight& w, double T, double t) {
  if (!(T > 0.0)) throw std::invalid_argument("alpha: need T > 0");
  if (!(t >= 0.0)) throw std::domain_error("alpha: need t >= 0");
  if (w.monotone == Monotonicity::Decreasing) return 1.0;
  const double r = eval_rho(w, t + T);
  return 1.0 / (r * r);
}

// beta(t): rho(t+T)/T for non-increasing weights; for increasing ones 1/T
// until t = T, then rho(t-T)/T (continuous since rho(0) = 1)
inline double beta(const TimeWeight& w, double T, double t) {
  if (!(T > 0.0)) throw std::invalid_argument("beta: need T > 0");
  if (!(t >= 0.0)) throw std::domain_error("beta: need t >= 0");
  if (w.monotone == Monotonicity::Decreasing) return eval_rho(w, t + T) / T;
  return t < T ? 1.0 / T : eval_rho(w, t - T) / T;
}

struct ShiftConstants {
  double t0 = 0.0;
  double c0 = 1.0;
};

// Smallest admissible c0 at the default onset t0 = 2T for the shift condition
// rho(t - 2T) >= c0 rho(t), t >= t0. For (1+t)^tau with tau > 0 the ratio
// rho(t-2T)/rho(t) is increasing in t, so the infimum sits at t0.
inline ShiftConstants shift_constants(const TimeWeight& w, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("shift_constants: need T > 0");
  if (w.monotone == Monotonicity::Decreasing) return {0.0, 1.0};
  const double t0 = 2.0 * T;
  return {t0, eval_rho(w, t0 - 2.0 * T) / eval_rho(w, t0)};
}

inline ValidationReport validate_weight(const TimeWeight& w, double T, double horizon,
                                        int n_samples = 512) {
  if (n_samples < 100) throw std::invalid_argument("validate_weight: need n_samples >= 100");
  if (!(T > 0.0)) throw std::invalid_argument("validate_weight: need T > 0");
  const ShiftConstants sc = shift_constants(w, T);
  if (!(horizon > sc.t0 + 2.0 * T))
    throw std::invalid_argument("validate_weight: horizon too short for the shift window");

  ValidationReport rep;
  rep.checks.push_back({"rho_normalized", eval_rho(w, 0.0) == 1.0, eval_rho(w, 0.0) - 1.0});

  {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_samples; ++i)
      lo = std::min(lo, eval_rho(w, horizon * static_cast<double>(i) / n_samples));
    rep.checks.push_back({"rho_positive", lo > 0.0, lo});
  }

  {  // declared monotonicity matches sampled behavior
    double worst = std::numeric_limits<double>::infinity();
    double prev = eval_rho(w, 0.0);
    for (int i = 1; i <= n_samples; ++i) {
      const double cur = eval_rho(w, horizon * static_cast<double>(i) / n_samples);
      const double step = w.monotone == Monotonicity::Increasing ? cur - prev : prev - cur;
      worst = std::min(worst, step);
      prev = cur;
    }
    rep.checks.push_back({"monotonicity_tag", worst >= -1e-12, worst});
  }

  {  // tightest sampled C0 in |rho'| <= C0 rho; passes iff <= declared C0
    double tight = 0.0;
    for (int i = 0; i <= n_samples; ++i) {
      const double t = horizon * static_cast<double>(i) / n_samples;
      tight = std::max(tight, std::abs(rho_prime(w, t)) / eval_rho(w, t));
    }
    rep.checks.push_back({"derivative_bound", tight <= w.C0 * (1.0 + 1e-12), tight});
  }

  if (w.monotone == Monotonicity::Increasing) {
    // tightest sampled c0 in rho(t-2T) >= c0 rho(t) for t in [t0, horizon]
    double tight = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_samples; ++i) {
      const double t = sc.t0 + (horizon - sc.t0) * static_cast<double>(i) / n_samples;
      tight = std::min(tight, eval_rho(w, t - 2.0 * T) / eval_rho(w, t));
    }
    rep.checks.push_back({"shift_condition", tight >= sc.c0 * (1.0 - 1e-12), tight});
  }

  if (w.family == WeightFamily::Constant) {
    // the constant weight must ride the decreasing branch: alpha = 1, beta = 1/T
    double worst = 0.0;
    for (int i = 0; i <= n_samples; ++i) {
      const double t = horizon * static_cast<double>(i) / n_samples;
      worst = std::max(worst, std::abs(alpha(w, T, t) - 1.0));
      worst = std::max(worst, std::abs(beta(w, T, t) * T - 1.0));
    }
    rep.checks.push_back({"constant_branch", worst == 0.0, worst});
  }

  return rep;
}

}  // namespace wavedecay
