#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavedecay/damping.hpp"
#include "wavedecay/numerics.hpp"
#include "wavedecay/ode.hpp"
#include "wavedecay/time_weight.hpp"

namespace wavedecay {

// Data for the decay envelope S(t) solving  dS/dt = -q(t, S), S(0) = S0, with
//   q(t, S) = beta(t) * h^{-1}(alpha(t) S / K)
//   h = I + m_T * h0( . / (T * m_T)),  m_T = T * Ma  (damping measure over a window)
// K > 1 is the observability constant multiplying the energy, Ma the damping
// mass 4*pi*integral(a r^2 dr), S0 the initial energy.

struct EnvelopeProblem {
  DampingLaw law;
  TimeWeight weight;
  double T = 1.0;
  double K = 2.0;
  double Ma = 1.0;
  double S0 = 1.0;
};

inline EnvelopeProblem make_envelope_problem(DampingLaw law, TimeWeight weight, double T,
                                             double K, double Ma, double S0) {
  if (!(T > 0.0)) throw std::invalid_argument("envelope: need T > 0");
  if (!(K > 1.0)) throw std::invalid_argument("envelope: need K > 1");
  if (!(Ma > 0.0)) throw std::invalid_argument("envelope: need Ma > 0");
  if (!(S0 >= 0.0)) throw std::invalid_argument("envelope: need S0 >= 0");
  return {std::move(law), weight, T, K, Ma, S0};
}

// damping measure over one window of length T
inline double window_measure(const EnvelopeProblem& p) { return p.T * p.Ma; }

inline double h_eval(const EnvelopeProblem& p, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::domain_error("h_eval: need finite s >= 0");
  const double mT = window_measure(p);
  return s + mT * h0_extended(p.law, s / (p.T * mT));
}

inline double h_inverse(const EnvelopeProblem& p, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("h_inverse: need finite x >= 0");
  if (x == 0.0) return 0.0;
  if (p.law.family == DampingFamily::Linear) {
    // h(s) = s (1 + 1/T) exactly for the linear family
    return x * p.T / (p.T + 1.0);
  }
  auto f = [&](double s) { return h_eval(p, s); };
  return bisect_increasing(f, x, 0.0, x, 1e-14, 200);
}

inline double q_eval(const EnvelopeProblem& p, double t, double S) {
  if (!(S >= 0.0) || !std::isfinite(S)) throw std::domain_error("q_eval: need finite S >= 0");
  if (S == 0.0) return 0.0;
  const double a = alpha(p.weight, p.T, t);
  const double b = beta(p.weight, p.T, t);
  return b * h_inverse(p, a * S / p.K);
}

struct EnvelopeTrajectory {
  std::vector<OdePoint> samples;  // one per accepted step, plus forced times
  double rel_tol = 0.0;
  bool floor_reached = false;

  // value at a sampled time (forced times are hit exactly by the integrator);
  // falls back to linear interpolation between adjacent samples
  double value_at(double t) const {
    if (samples.empty()) throw std::runtime_error("EnvelopeTrajectory: empty");
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const OdePoint& p, double x) { return p.t < x; });
    if (it == samples.end()) throw std::out_of_range("EnvelopeTrajectory: t beyond samples");
    if (it->t == t || it == samples.begin()) return it->y;
    const auto& lo = *(it - 1);
    const double w = (t - lo.t) / (it->t - lo.t);
    return lo.y + w * (it->y - lo.y);
  }
};

// Integrates the envelope ODE over [0, t_end] with adaptive embedded RK and a
// positivity guard. `forced_times` are hit exactly (used to compare against
// simulation samples). Stops early once S drops below S0 * 1e-250 to avoid
// denormal churn on stretched-exponential decays.
inline EnvelopeTrajectory integrate_envelope(const EnvelopeProblem& p, double t_end,
                                             double rel_tol,
                                             std::vector<double> forced_times = {}) {
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_envelope: need t_end > 0");
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-2))
    throw std::invalid_argument("integrate_envelope: rel_tol outside [1e-12, 1e-2]");

  EnvelopeTrajectory traj;
  traj.rel_tol = rel_tol;
  if (p.S0 == 0.0) {  // q(t, 0) = 0: the envelope stays identically zero
    std::sort(forced_times.begin(), forced_times.end());
    traj.samples.push_back({0.0, 0.0});
    for (double ft : forced_times)
      if (ft > 0.0 && ft < t_end) traj.samples.push_back({ft, 0.0});
    traj.samples.push_back({t_end, 0.0});
    return traj;
  }

  // the increasing-weight beta has a slope kink at t = T; land a step on it
  if (p.weight.monotone == Monotonicity::Increasing && p.T < t_end)
    forced_times.push_back(p.T);

  auto rhs = [&](double t, double S) { return S <= 0.0 ? 0.0 : -q_eval(p, t, S); };
  DecayOdeResult r =
      integrate_decay_ode(rhs, 0.0, p.S0, t_end, rel_tol, std::move(forced_times),
                          p.S0 * 1e-250);
  traj.samples = std::move(r.points);
  traj.floor_reached = r.floor_reached;
  return traj;
}

struct DivergenceResult {
  bool diverges = false;
  double integral = 0.0;  // value over [T0, t_max]
};

// Checks divergence of  t -> integral of q(s, gamma) ds  by dyadic partial
// sums: the integral over [T0 2^k, T0 2^{k+1}] is compared window to window.
// Ratios >= ~3/4 indicate log-type or worse growth (divergent); geometric
// decay of the windows indicates a bounded integral.
inline DivergenceResult divergence_check(const EnvelopeProblem& p, double gamma, double T0,
                                         double t_max) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("divergence_check: need gamma in (0,1)");
  if (!(T0 >= 1.0)) throw std::invalid_argument("divergence_check: need T0 >= 1");
  if (!(t_max >= 8.0 * T0))
    throw std::invalid_argument("divergence_check: need t_max >= 8*T0");

  auto f = [&](double s) { return q_eval(p, s, gamma); };
  DivergenceResult out;
  std::vector<double> windows;
  double lo = T0;
  while (lo < t_max) {
    const double hi = std::min(2.0 * lo, t_max);
    const double w = adaptive_simpson_segmented(f, lo, hi, 1e-10);
    out.integral += w;
    if (hi == 2.0 * lo) windows.push_back(w);  // complete dyads only
    lo = hi;
  }
  if (windows.size() < 2)
    throw std::invalid_argument("divergence_check: window too short for a dyadic trend");
  // median of the trailing ratios
  std::vector<double> ratios;
  for (std::size_t k = windows.size() >= 4 ? windows.size() - 3 : 1; k < windows.size(); ++k)
    ratios.push_back(windows[k] / windows[k - 1]);
  std::sort(ratios.begin(), ratios.end());
  const double med = ratios[ratios.size() / 2];
  out.diverges = med >= 0.75;
  return out;
}

// chi(s) = C1 * h0^{-1}(s / (2 C2)), C1 = min(T*Ma, 1), C2 = max(T*Ma, 1):
// an explicit lower envelope for h^{-1} near 0.
inline double chi_eval(const EnvelopeProblem& p, double s) {
  const double mT = window_measure(p);
  const double C1 = std::min(mT, 1.0);
  const double C2 = std::max(mT, 1.0);
  const double arg = s / (2.0 * C2);
  if (!(arg >= 0.0 && arg <= 1.0))
    throw std::domain_error("chi_eval: s/(2 C2) outside [0,1]");
  return C1 * h0_inverse(p.law, arg);
}

// Largest s* <= 1 such that chi(s) <= h_inverse(s) holds on a log-spaced scan
// of (0, s*]; reports how far the comparison function is actually valid.
inline double validated_eps0(const EnvelopeProblem& p, int n_samples = 400) {
  const double mT = window_measure(p);
  const double s_hi = std::min(1.0, 2.0 * std::max(mT, 1.0));
  const double s_lo = s_hi * 1e-12;
  double best = 0.0;
  for (int i = 0; i <= n_samples; ++i) {
    const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / n_samples);
    if (chi_eval(p, s) <= h_inverse(p, s) * (1.0 + 1e-12))
      best = s;
    else
      break;
  }
  return best;
}

}  // namespace wavedecay
