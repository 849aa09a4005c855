#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wavedecay/damping.hpp"
#include "wavedecay/numerics.hpp"
#include "wavedecay/time_weight.hpp"

namespace wavedecay {

// Radial reduction of the damped wave equation exterior to the unit ball:
// with u(t,x) = U(t,|x|) and v = r U, the problem becomes the half-line system
//
//   v_tt - v_rr + r a(r) rho(t) g(v_t / r) = 0,   r > 1,   v(t,1) = 0,
//
// integrated by leapfrog with the damping term implicit in the centered
// velocity w = (v^{n+1} - v^{n-1}) / (2 dt). Energies carry the 4*pi angular
// factor, so they equal the corresponding integrals over R^3:
//
//   E = 1/2 * 4pi * integral (v_r - v/r)^2 + v_t^2 dr
//     = 1/2 * integral_{R^3} |grad u|^2 + u_t^2 dx.
//
// The grid is truncated at r_max >= R + t_end + 2 dr with the outermost value
// frozen: by finite speed of propagation nothing launched from [1, R] reaches
// it within t_end, so the truncation is exact for the reported energies.

struct RadialDomain {
  double r_in = 1.0;
  double R = 2.0;      // observation radius (grid-aligned)
  double r_max = 3.0;  // outer truncation (grid-aligned, >= R + t_end + 2 dr)
  double dr = 0.01;
  int n = 0;  // nodes r_i = r_in + i*dr, i = 0..n

  double r(int i) const { return r_in + dr * i; }
  int index_of_R() const { return static_cast<int>(std::lround((R - r_in) / dr)); }
};

inline RadialDomain make_domain(double R, double dr, double t_end) {
  if (!(R > 1.0)) throw std::invalid_argument("make_domain: need R > 1");
  if (!(dr > 0.0 && dr < R - 1.0)) throw std::invalid_argument("make_domain: bad dr");
  if (!(t_end > 0.0)) throw std::invalid_argument("make_domain: need t_end > 0");
  RadialDomain d;
  d.R = R;
  d.dr = dr;
  const double iR = (R - 1.0) / dr;
  if (std::abs(iR - std::lround(iR)) > 1e-9)
    throw std::invalid_argument("make_domain: R - 1 must be a multiple of dr");
  const double needed = R + t_end + 2.0 * dr;
  d.n = static_cast<int>(std::ceil((needed - 1.0) / dr - 1e-12));
  d.r_max = 1.0 + d.n * dr;
  return d;
}

// Damping coefficient a(r) supported in (r_in, r_a), amplitude-scaled.
//   Annulus:    a = amplitude on [r_in, r_a), 0 beyond (discontinuous)
//   SmoothBump: C-infinity bump vanishing at r_in and r_a
struct DampingProfile {
  enum class Shape { Annulus, SmoothBump };
  Shape shape = Shape::SmoothBump;
  double r_a = 1.5;
  double amplitude = 1.0;

  double value(double r) const {
    if (amplitude == 0.0) return 0.0;
    if (shape == Shape::Annulus) return (r >= 1.0 && r < r_a) ? amplitude : 0.0;
    if (r <= 1.0 || r >= r_a) return 0.0;
    const double xi = (2.0 * r - 1.0 - r_a) / (r_a - 1.0);  // (1, r_a) -> (-1, 1)
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - xi * xi));
  }

  // Ma = 4 pi * integral a(r) r^2 dr (the R^3 mass of the damping coefficient)
  double mass() const {
    if (amplitude == 0.0) return 0.0;
    if (shape == Shape::Annulus)
      return 4.0 * M_PI * amplitude * (r_a * r_a * r_a - 1.0) / 3.0;
    return 4.0 * M_PI *
           adaptive_simpson([&](double r) { return value(r) * r * r; }, 1.0, r_a,
                            1e-12 * amplitude);
  }
};

inline DampingProfile make_damping_profile(DampingProfile::Shape shape, double r_a,
                                           double amplitude) {
  if (!(r_a > 1.0)) throw std::invalid_argument("damping profile: need r_a > 1");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("damping profile: need amplitude >= 0");
  return {shape, r_a, amplitude};
}

// Initial data, given in u-variables as (phi0, phi1) = (u(0), u_t(0)) and
// converted to v = r u internally. Supports must sit strictly inside
// (r_in, R) so the observed energy initially equals the total energy.
//
//   GaussianBump(c, w):  phi0 = windowed Gaussian exp(-((r-c)/w)^2) cut to
//                        exactly 0 outside |r-c| < 4w with a C-infinity taper
//                        on 3w < |r-c| < 4w; phi1 = 0.
//   OutgoingPulse(c, w): a right-moving pulse in v: v0 = C-infinity bump of
//                        half-width w at c, v1 = -v0'.
//   Custom:              node samples of phi0, phi1.
struct InitialData {
  enum class Kind { GaussianBump, OutgoingPulse, Custom };
  Kind kind = Kind::GaussianBump;
  double center = 0.0, width = 0.0;
  std::vector<double> phi0, phi1;  // Custom only

  double support_lo() const {
    return kind == Kind::OutgoingPulse ? center - width : center - 4.0 * width;
  }
  double support_hi() const {
    return kind == Kind::OutgoingPulse ? center + width : center + 4.0 * width;
  }

  // v and v_t at t = 0 (analytic kinds only)
  double v0(double r) const {
    switch (kind) {
      case Kind::GaussianBump:
        return r * gauss(r);
      case Kind::OutgoingPulse:
        return bump(r);
      case Kind::Custom:
        throw std::logic_error("InitialData: custom data has no closed form");
    }
    return 0.0;
  }
  double v1(double r) const {
    switch (kind) {
      case Kind::GaussianBump:
        return 0.0;
      case Kind::OutgoingPulse:
        return -bump_prime(r);
      case Kind::Custom:
        throw std::logic_error("InitialData: custom data has no closed form");
    }
    return 0.0;
  }

 private:
  static double smooth_step(double x) {  // C-infinity, 0 at x<=0, 1 at x>=1
    auto sig = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double a = sig(x), b = sig(1.0 - x);
    return a / (a + b);
  }
  double gauss(double r) const {
    const double d = std::abs(r - center);
    if (d >= 4.0 * width) return 0.0;
    const double core = std::exp(-(d / width) * (d / width));
    if (d <= 3.0 * width) return core;
    return core * smooth_step(4.0 - d / width);  // taper 3w..4w
  }
  double bump(double r) const {
    const double xi = (r - center) / width;
    if (std::abs(xi) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
  }
  double bump_prime(double r) const {
    const double xi = (r - center) / width;
    if (std::abs(xi) >= 1.0) return 0.0;
    const double om = 1.0 - xi * xi;
    return bump(r) * (-2.0 * xi / (om * om)) / width;
  }
};

inline InitialData make_gaussian_bump(double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian bump: need width > 0");
  InitialData d;
  d.kind = InitialData::Kind::GaussianBump;
  d.center = center;
  d.width = width;
  return d;
}

inline InitialData make_outgoing_pulse(double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("outgoing pulse: need width > 0");
  InitialData d;
  d.kind = InitialData::Kind::OutgoingPulse;
  d.center = center;
  d.width = width;
  return d;
}

inline InitialData make_custom_data(std::vector<double> phi0, std::vector<double> phi1) {
  InitialData d;
  d.kind = InitialData::Kind::Custom;
  d.phi0 = std::move(phi0);
  d.phi1 = std::move(phi1);
  return d;
}

// Scalar implicit update: the unique w solving  w + c * r * g(w/r) = b
// (c >= 0, r >= 1). Strictly increasing in w, so Newton with a bisection
// safeguard on the bracket [0, b] converges; residual is driven below
// 1e-12 * max(|b|, 1).
inline double solve_velocity_update(double c, double b, const DampingLaw& law, double r) {
  if (!(c >= 0.0)) throw std::invalid_argument("solve_velocity_update: need c >= 0");
  if (!(r >= 1.0)) throw std::invalid_argument("solve_velocity_update: need r >= 1");
  if (!std::isfinite(b)) throw std::domain_error("solve_velocity_update: non-finite b");
  if (c == 0.0 || b == 0.0) return b;
  const double ftol = 1e-12 * std::max(std::abs(b), 1.0);
  auto f = [&](double w) { return w + c * r * eval_g(law, w / r) - b; };
  auto df = [&](double w) { return 1.0 + c * g_prime(law, w / r); };
  const double lo = std::min(0.0, b), hi = std::max(0.0, b);
  return newton_bisection(f, df, lo, hi, b, ftol);
}

struct TimeSeriesRow {
  double t = 0.0;
  double E_total = 0.0;
  double E_R = 0.0;
  double D_cum = 0.0;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
  double R = 0.0;       // observation radius used for E_R
  double dt = 0.0;      // step actually used
  bool complete = true; // false if the run aborted
};

// max over rows of |E_total(t) + D_cum(t) - E_total(0)| / E_total(0)
inline double energy_identity_residual(const TimeSeries& s) {
  if (s.rows.empty()) throw std::invalid_argument("energy_identity_residual: empty series");
  const double E0 = s.rows.front().E_total;
  if (!(E0 > 0.0)) return 0.0;
  double worst = 0.0;
  for (const auto& row : s.rows)
    worst = std::max(worst, std::abs(row.E_total + row.D_cum - E0) / E0);
  return worst;
}

class WaveSimulation {
 public:
  WaveSimulation(const RadialDomain& dom, const DampingProfile& prof, DampingLaw law,
                 TimeWeight weight, const InitialData& data, double dt)
      : dom_(dom), law_(std::move(law)), weight_(weight), dt_(dt) {
    if (!(dt > 0.0 && dt <= 0.9 * dom.dr * (1.0 + 1e-12)))
      throw std::invalid_argument("WaveSimulation: CFL requires dt <= 0.9 dr");
    if (!(prof.r_a <= dom.R))
      throw std::invalid_argument("WaveSimulation: damping support must lie inside B_R");
    const int n = dom.n;
    v_prev_.assign(n + 1, 0.0);
    v_curr_.assign(n + 1, 0.0);
    v_next_.assign(n + 1, 0.0);
    w_mid_.assign(n + 1, 0.0);
    a_.assign(n + 1, 0.0);
    v1_init_.assign(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) a_[i] = prof.value(dom.r(i));

    // sample initial data (v = r u); custom data arrives as u-node values
    if (data.kind == InitialData::Kind::Custom) {
      if (static_cast<int>(data.phi0.size()) != n + 1 ||
          static_cast<int>(data.phi1.size()) != n + 1)
        throw std::invalid_argument("WaveSimulation: custom data size mismatch");
      for (int i = 0; i <= n; ++i) {
        v_curr_[i] = dom.r(i) * data.phi0[i];
        v1_init_[i] = dom.r(i) * data.phi1[i];
      }
      if (v_curr_[0] != 0.0 || v_curr_[n] != 0.0 || v1_init_[n] != 0.0)
        throw std::invalid_argument("WaveSimulation: custom data violates the boundary");
    } else {
      if (!(data.support_lo() > dom.r_in && data.support_hi() < dom.R))
        throw std::invalid_argument(
            "WaveSimulation: initial data support must sit inside (r_in, R)");
      for (int i = 0; i <= n; ++i) {
        v_curr_[i] = data.v0(dom.r(i));
        v1_init_[i] = data.v1(dom.r(i));
      }
    }

    // seed the pre-initial level by a backward Taylor step consistent with
    // the PDE to O(dt^3); the first leapfrog step then reproduces a
    // Taylor-consistent second level with the damping handled implicitly
    const double rho0 = eval_rho(weight_, 0.0);
    for (int i = 1; i < n; ++i) {
      const double d2 =
          (v_curr_[i + 1] - 2.0 * v_curr_[i] + v_curr_[i - 1]) / (dom.dr * dom.dr);
      const double r = dom.r(i);
      const double acc = d2 - r * a_[i] * rho0 * eval_g(law_, v1_init_[i] / r);
      v_prev_[i] = v_curr_[i] - dt_ * v1_init_[i] + 0.5 * dt_ * dt_ * acc;
    }
    v_prev_[0] = 0.0;
    v_prev_[n] = v_curr_[n];
  }

  double dt() const { return dt_; }
  int steps_done() const { return steps_; }
  // time of the last completed middle level (energies/dissipation refer to it)
  double time() const { return steps_ == 0 ? 0.0 : dt_ * (steps_ - 1); }

  // field value v at node i, at the middle level (same instant as time())
  double value_at_node(int i) const {
    return steps_ == 0 ? v_curr_[static_cast<std::size_t>(i)]
                       : v_prev_[static_cast<std::size_t>(i)];
  }

  // advance one step: consumes middle level t_m, produces level t_m + dt and
  // the implicit centered velocity at t_m
  void step() {
    const int n = dom_.n;
    const double tm = dt_ * steps_;
    const double rho = eval_rho(weight_, tm);
    const double dr2 = dom_.dr * dom_.dr;
    for (int i = 1; i < n; ++i) {
      const double d2 = (v_curr_[i + 1] - 2.0 * v_curr_[i] + v_curr_[i - 1]) / dr2;
      const double b = (v_curr_[i] - v_prev_[i]) / dt_ + 0.5 * dt_ * d2;
      double w = b;
      if (a_[i] > 0.0) {
        const double c = 0.5 * dt_ * a_[i] * rho;
        w = solve_velocity_update(c, b, law_, dom_.r(i));
      }
      w_mid_[i] = w;
      v_next_[i] = v_prev_[i] + 2.0 * dt_ * w;
    }
    v_next_[0] = 0.0;
    w_mid_[0] = 0.0;
    v_next_[n] = v_curr_[n];  // frozen outer node (never reached within t_end)
    w_mid_[n] = 0.0;
    last_rho_ = rho;

    // rotate levels: (prev, curr) <- (curr, next)
    std::swap(v_prev_, v_curr_);  // v_prev_ now holds the middle level
    std::swap(v_curr_, v_next_);
    ++steps_;
  }

  // dissipation rate d(t_m) = 4 pi * integral a rho g(w/r) (w/r) r^2 dr at the
  // last completed middle level, with the same implicit velocity as the step
  double dissipation_rate() const {
    if (steps_ == 0) throw std::logic_error("dissipation_rate: no step taken yet");
    double sum = 0.0;
    for (int i = 1; i < dom_.n; ++i) {
      if (a_[i] == 0.0) continue;
      const double r = dom_.r(i);
      const double ut = w_mid_[i] / r;
      sum += a_[i] * eval_g(law_, ut) * ut * r * r;
    }
    return 4.0 * M_PI * last_rho_ * sum * dom_.dr;
  }

  double total_energy() const { return energy_upto(dom_.n); }
  double local_energy() const { return energy_upto(dom_.index_of_R()); }

  // staggered leapfrog energy at the last half step; exactly non-increasing
  // (its per-step drop equals dt * dissipation_rate up to roundoff)
  double scheme_energy() const {
    if (steps_ == 0) throw std::logic_error("scheme_energy: no step taken yet");
    const int n = dom_.n;
    double kin = 0.0, pot = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double dv = (v_curr_[i] - v_prev_[i]) / dt_;
      kin += dv * dv;
    }
    for (int i = 0; i < n; ++i) {
      const double ga = (v_prev_[i + 1] - v_prev_[i]) / dom_.dr;
      const double gb = (v_curr_[i + 1] - v_curr_[i]) / dom_.dr;
      pot += ga * gb;
    }
    return 4.0 * M_PI * 0.5 * (kin + pot) * dom_.dr;
  }

  // run to t_end, recording every `sample_every` steps (and the final step)
  TimeSeries run(double t_end, int sample_every) {
    if (!(t_end > 0.0)) throw std::invalid_argument("run: need t_end > 0");
    if (sample_every < 1) throw std::invalid_argument("run: need sample_every >= 1");
    const int n_levels = static_cast<int>(std::ceil(t_end / dt_ - 1e-9));
    TimeSeries ts;
    ts.R = dom_.R;
    ts.dt = dt_;
    double d0 = 0.0, d_last = 0.0, d_sum = 0.0;  // trapezoid-in-time pieces
    for (int m = 0; m <= n_levels; ++m) {
      step();  // completes middle level m
      const double dm = dissipation_rate();
      if (m == 0) d0 = dm;
      d_sum += dm;
      d_last = dm;
      if (m % sample_every == 0 || m == n_levels) {
        TimeSeriesRow row;
        row.t = dt_ * m;
        row.E_total = total_energy();
        row.E_R = local_energy();
        row.D_cum = dt_ * (d_sum - 0.5 * d0 - 0.5 * d_last);
        ts.rows.push_back(row);
      }
    }
    return ts;
  }

 private:
  // trapezoidal energy over [r_0, r_iHi] of (v_r - v/r)^2 + v_t^2; the spatial
  // derivative is centered at interior grid nodes and one-sided only at the
  // physical grid ends, so the observed energy never exceeds the total one;
  // field values are the middle level, the velocity its implicit centered
  // difference
  double energy_upto(int i_hi) const {
    const std::vector<double>& v = steps_ == 0 ? v_curr_ : v_prev_;
    double sum = 0.0;
    for (int i = 0; i <= i_hi; ++i) {
      const double r = dom_.r(i);
      double vr;
      if (i == 0)
        vr = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dom_.dr);
      else if (i == dom_.n)
        vr = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * dom_.dr);
      else
        vr = (v[i + 1] - v[i - 1]) / (2.0 * dom_.dr);
      const double vt = steps_ == 0 ? v1_init_[i] : w_mid_[i];
      const double e = (vr - v[i] / r) * (vr - v[i] / r) + vt * vt;
      sum += (i == 0 || i == i_hi) ? 0.5 * e : e;
    }
    return 4.0 * M_PI * 0.5 * sum * dom_.dr;
  }

  RadialDomain dom_;
  DampingLaw law_;
  TimeWeight weight_;
  double dt_ = 0.0;
  int steps_ = 0;
  double last_rho_ = 1.0;
  std::vector<double> v_prev_, v_curr_, v_next_, w_mid_, a_, v1_init_;
};

// Exact solution of the undamped half-line problem (a == 0) by d'Alembert with
// odd reflection about r = 1: used as the convergence/accuracy oracle.
inline double dalembert_value(const InitialData& data, double t, double r) {
  if (data.kind == InitialData::Kind::Custom)
    throw std::invalid_argument("dalembert_value: closed form needs analytic data");
  auto V0 = [&](double xi) {  // odd extension of v0 about r = 1
    return xi >= 1.0 ? data.v0(xi) : -data.v0(2.0 - xi);
  };
  // W(xi) = integral_1^xi V1; for GaussianBump V1 = 0, for OutgoingPulse
  // v1 = -v0' integrates to -v0, and the odd extension makes W even about 1
  auto W = [&](double xi) {
    if (data.kind == InitialData::Kind::GaussianBump) return 0.0;
    return -data.v0(std::max(xi, 2.0 - xi));
  };
  return 0.5 * (V0(r - t) + V0(r + t)) + 0.5 * (W(r + t) - W(r - t));
}

}  // namespace wavedecay
