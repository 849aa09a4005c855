#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wavedecay {

struct OdePoint {
  double t = 0.0;
  double y = 0.0;
};

// Thrown when step-size control underflows; carries the last valid state.
struct IntegrationStall : std::runtime_error {
  double t, y;
  IntegrationStall(double t_, double y_)
      : std::runtime_error("ODE integration stalled (step size underflow)"), t(t_), y(y_) {}
};

struct DecayOdeResult {
  std::vector<OdePoint> points;  // one per accepted step (plus forced times)
  bool floor_reached = false;    // stopped early because y fell below y_floor
};

// Embedded Dormand-Prince 5(4) for scalar y' = f(t, y) with y >= 0 decaying.
// Relative error control; steps that would take any stage or the new value
// negative are rejected and halved, so the solution never overshoots below 0.
// `forced_times` (sorted, within [t0, t1]) are hit exactly and recorded.
// Integration stops early if y <= y_floor (flagged in the result).
template <class F>
DecayOdeResult integrate_decay_ode(F f, double t0, double y0, double t1, double rel_tol,
                                   std::vector<double> forced_times = {},
                                   double y_floor = 0.0) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (embedded 4th order difference), with the k7 term
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 > t0)) throw std::invalid_argument("integrate_decay_ode: need t1 > t0");

  std::sort(forced_times.begin(), forced_times.end());
  std::size_t next_forced = 0;
  auto skip_forced_until = [&](double t) {
    while (next_forced < forced_times.size() && forced_times[next_forced] <= t) ++next_forced;
  };

  DecayOdeResult out;
  out.points.push_back({t0, y0});
  skip_forced_until(t0);

  double t = t0, y = y0;
  double k1 = f(t, y);
  double h = std::min((t1 - t0) * 1e-4, 1.0);
  if (h <= 0.0) h = 1e-6;

  const int max_steps = 20'000'000;
  for (int step = 0; step < max_steps; ++step) {
    if (t >= t1) return out;
    bool hit_forced = false;
    double target = t1;
    if (next_forced < forced_times.size()) target = std::min(target, forced_times[next_forced]);
    if (t + h >= target) {
      h = target - t;
      hit_forced = true;
    }
    if (h <= std::abs(t) * 1e-15 + 1e-290) throw IntegrationStall(t, y);

    bool reject = false;
    double y5 = 0.0, err = 0.0, k7 = 0.0;
    double y2 = y + h * a21 * k1;
    double k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0;
    if (y2 < 0.0) reject = true;
    if (!reject) {
      k2 = f(t + h / 5.0, y2);
      const double y3 = y + h * (a31 * k1 + a32 * k2);
      if (y3 < 0.0) reject = true;
      if (!reject) {
        k3 = f(t + 3.0 * h / 10.0, y3);
        const double y4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        if (y4 < 0.0) reject = true;
        if (!reject) {
          k4 = f(t + 4.0 * h / 5.0, y4);
          const double y5s = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
          if (y5s < 0.0) reject = true;
          if (!reject) {
            k5 = f(t + 8.0 * h / 9.0, y5s);
            const double y6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            if (y6 < 0.0) reject = true;
            if (!reject) {
              k6 = f(t + h, y6);
              y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
              if (y5 < 0.0) reject = true;
              if (!reject) {
                k7 = f(t + h, y5);
                err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
              }
            }
          }
        }
      }
    }

    if (reject) {
      h *= 0.5;
      continue;
    }

    const double scale = rel_tol * std::max({std::abs(y), std::abs(y5), 1e-300});
    const double ratio = std::abs(err) / scale;
    if (ratio <= 1.0) {
      const double t_new = hit_forced ? target : t + h;
      t = t_new;
      y = y5;
      k1 = k7;  // FSAL
      out.points.push_back({t, y});
      skip_forced_until(t);
      if (y <= y_floor) {
        out.floor_reached = true;
        return out;
      }
      const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
      h = h * std::clamp(grow, 0.2, 5.0);
    } else {
      h = h * std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.9);
    }
  }
  throw std::runtime_error("integrate_decay_ode: step cap exceeded");
}

}  // namespace wavedecay
