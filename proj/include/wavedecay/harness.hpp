#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavedecay/config.hpp"
#include "wavedecay/csv.hpp"
#include "wavedecay/envelope.hpp"
#include "wavedecay/fitting.hpp"
#include "wavedecay/rates.hpp"
#include "wavedecay/wave.hpp"

namespace wavedecay {

// Slack on the domination/window inequalities: pure-roundoff allowance.
// Checks against finite-difference energies widen it to the measured noise
// scale (the energy identity residual), since sampled energies carry an
// O(dt^2) measurement error.
inline constexpr double kDominationSlack = 1e-9;

// ---- energy domination: W(t) <= S(t - T) for t >= T ----

struct DominationCheck {
  bool holds = false;
  double worst_ratio = 0.0;  // max over samples of W(t) / S(t - T)
  double worst_t = 0.0;
};

inline std::vector<double> shifted_sample_times(const TimeSeries& s, double T) {
  std::vector<double> times;
  for (const auto& row : s.rows)
    if (row.t >= T) times.push_back(row.t - T);
  return times;
}

// W is the observed energy E_R (default) or the total energy
inline DominationCheck check_energy_domination(const TimeSeries& s, const EnvelopeProblem& p,
                                               double rel_tol = 1e-8,
                                               bool use_local = true) {
  if (s.rows.empty()) throw std::invalid_argument("check_energy_domination: empty series");
  std::vector<double> times = shifted_sample_times(s, p.T);
  if (times.empty())
    throw std::invalid_argument("check_energy_domination: series ends before t = T");

  DominationCheck out;
  out.holds = true;
  if (p.S0 == 0.0) {  // zero envelope dominates only the zero series
    for (const auto& row : s.rows) {
      const double W = use_local ? row.E_R : row.E_total;
      if (row.t >= p.T && W > 0.0) {
        out.holds = false;
        out.worst_ratio = std::numeric_limits<double>::infinity();
        out.worst_t = row.t;
        return out;
      }
    }
    return out;
  }

  const double t_span = times.back() > 0.0 ? times.back() : 1.0;
  EnvelopeTrajectory traj = integrate_envelope(p, t_span, rel_tol, times);
  const double t_last = traj.samples.back().t;  // < t_span when the floor cut it
  for (const auto& row : s.rows) {
    if (row.t < p.T) continue;
    const double W = use_local ? row.E_R : row.E_total;
    const double S = traj.value_at(std::min(row.t - p.T, t_last));
    const double ratio = W <= 0.0 ? 0.0 : (S > 0.0 ? W / S : std::numeric_limits<double>::infinity());
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = row.t;
    }
  }
  out.holds = out.worst_ratio <= 1.0 + kDominationSlack;
  return out;
}

// ---- discrete one-window decay (the induction behind the envelope) ----
//
// Checks  W((m+1)T) + kappa(mT) L(mT, W(mT)) <= W(mT)  over the sampled
// multiples of T, where L(t, x) = h^{-1}(alpha(t) x / K) and
// kappa(t) = T * sup_{[t, t+T]} beta (the sup sits at an endpoint since beta
// is monotone). Also verifies the structural hypotheses behind the discrete
// comparison argument: x - kappa L(t, x) non-decreasing in x on [0, W(0)],
// L(t, x) non-increasing in t, and W non-increasing across the windows.
// `tol` is the allowed violation relative to W(0).

struct WindowViolation {
  int m = 0;
  double slack = 0.0;  // (W_m - lhs) / W(0); negative = violated
};

struct DiscreteLemmaCheck {
  bool ok = false;
  bool hypotheses_ok = false;
  int windows = 0;
  std::vector<WindowViolation> violations;
};

inline double window_gain(const EnvelopeProblem& p, double t, double x) {
  return h_inverse(p, alpha(p.weight, p.T, t) * x / p.K);
}

inline double window_kappa(const EnvelopeProblem& p, double t) {
  const double b_lo = beta(p.weight, p.T, t);
  const double b_hi = beta(p.weight, p.T, t + p.T);
  return p.T * std::max(b_lo, b_hi);
}

namespace detail {

// energies at the sampled multiples of T (the series must be sampled there)
inline std::vector<double> window_energies(const TimeSeries& s, double T, bool use_local) {
  if (s.rows.size() < 2) throw std::invalid_argument("window_energies: empty series");
  std::vector<double> W;
  const double row_dt = s.rows[1].t - s.rows[0].t;
  std::size_t j = 0;
  for (int m = 0;; ++m) {
    const double target = m * T;
    if (target > s.rows.back().t + 0.5 * row_dt) break;
    while (j + 1 < s.rows.size() &&
           std::abs(s.rows[j + 1].t - target) <= std::abs(s.rows[j].t - target))
      ++j;
    if (std::abs(s.rows[j].t - target) > 0.51 * row_dt)
      throw std::invalid_argument("window_energies: series not sampled at t = " +
                                  format_double(target));
    W.push_back(use_local ? s.rows[j].E_R : s.rows[j].E_total);
  }
  if (W.size() < 2)
    throw std::invalid_argument("window_energies: need at least one full window");
  return W;
}

}  // namespace detail

inline DiscreteLemmaCheck check_discrete_lemma(const TimeSeries& s, const EnvelopeProblem& p,
                                               bool use_local = true,
                                               double tol = kDominationSlack) {
  const std::vector<double> W = detail::window_energies(s, p.T, use_local);
  DiscreteLemmaCheck out;
  out.windows = static_cast<int>(W.size()) - 1;
  const double W0 = W.front() > 0.0 ? W.front() : 1.0;

  for (int m = 0; m + 1 < static_cast<int>(W.size()); ++m) {
    const double t = m * p.T;
    const double lhs = W[m + 1] + window_kappa(p, t) * window_gain(p, t, W[m]);
    const double slack = (W[m] - lhs) / W0;
    if (slack < -tol) out.violations.push_back({m, slack});
  }

  // structural hypotheses, sampled
  out.hypotheses_ok = true;
  const int nx = 64;
  for (int m = 0; m < static_cast<int>(W.size()) && out.hypotheses_ok; ++m) {
    const double t = m * p.T;
    const double kap = window_kappa(p, t);
    double prev = 0.0;
    for (int i = 1; i <= nx; ++i) {
      const double x = W0 * static_cast<double>(i) / nx;
      const double val = x - kap * window_gain(p, t, x);
      if (val < prev - 1e-12 * W0) {
        out.hypotheses_ok = false;
        break;
      }
      prev = val;
    }
  }
  for (int i = 1; i <= 8 && out.hypotheses_ok; ++i) {
    const double x = W0 * static_cast<double>(i) / 8;
    double prev = window_gain(p, 0.0, x);
    for (int m = 1; m < static_cast<int>(W.size()); ++m) {
      const double cur = window_gain(p, m * p.T, x);
      if (cur > prev * (1.0 + 1e-12)) {
        out.hypotheses_ok = false;
        break;
      }
      prev = cur;
    }
  }
  // W itself must be non-increasing (within the noise allowance)
  for (std::size_t k = 0; k + 1 < W.size() && out.hypotheses_ok; ++k)
    if (W[k + 1] > W[k] + tol * W0) out.hypotheses_ok = false;

  out.ok = out.violations.empty() && out.hypotheses_ok;
  return out;
}

// ---- minimal-constant fits (both predicates are monotone in K: a larger K
//      weakens the envelope's forcing, so validity is an upward-closed set) ----

namespace detail {

template <class Pred>
double fit_minimal_constant(Pred ok, double K_lo, double K_hi, const std::string& what,
                            const std::string& why_hi_fails) {
  if (!(K_lo > 1.0 && K_hi > K_lo)) throw std::invalid_argument(what + ": bad K range");
  if (ok(K_lo)) return K_lo;
  if (!ok(K_hi))
    throw std::runtime_error(what + ": no K <= " + format_double(K_hi) + " validates" +
                             why_hi_fails);
  double lo = K_lo, hi = K_hi;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;  // validated end of the bracket
}

}  // namespace detail

// Smallest K in [K_lo, K_hi] whose envelope dominates the series. The
// envelope's S0 is the series' initial total energy. Throws if even K_hi fails.
inline double fit_minimal_K(const TimeSeries& s, const EnvelopeProblem& tmpl,
                            double K_lo = 1.0 + 1e-6, double K_hi = 256.0,
                            bool use_local = true) {
  EnvelopeProblem p = tmpl;
  p.S0 = s.rows.empty() ? 0.0 : s.rows.front().E_total;
  auto ok = [&](double K) {
    p.K = K;
    return check_energy_domination(s, p, 1e-8, use_local).holds;
  };
  std::string why;
  {
    p.K = K_hi;
    const DominationCheck at_hi = check_energy_domination(s, p, 1e-8, use_local);
    if (!at_hi.holds)
      why = "; worst ratio " + format_double(at_hi.worst_ratio) + " at t = " +
            format_double(at_hi.worst_t);
  }
  return detail::fit_minimal_constant(ok, K_lo, K_hi, "fit_minimal_K", why);
}

// Smallest K in [K_lo, K_hi] for which the discrete window inequality holds at
// every sampled window, with violation allowance `tol` relative to W(0). The
// structural hypotheses are independent of K and reported by
// check_discrete_lemma; only the per-window inequality drives this fit.
inline double fit_minimal_lemma_K(const TimeSeries& s, const EnvelopeProblem& tmpl,
                                  double tol = kDominationSlack,
                                  double K_lo = 1.0 + 1e-6, double K_hi = 256.0,
                                  bool use_local = true) {
  EnvelopeProblem p = tmpl;
  auto ok = [&](double K) {
    p.K = K;
    return check_discrete_lemma(s, p, use_local, tol).violations.empty();
  };
  std::string why;
  {
    p.K = K_hi;
    const DiscreteLemmaCheck at_hi = check_discrete_lemma(s, p, use_local, tol);
    if (!at_hi.violations.empty()) {
      double worst = 0.0;
      for (const auto& v : at_hi.violations) worst = std::min(worst, v.slack);
      why = "; worst window slack " + format_double(worst);
    }
  }
  return detail::fit_minimal_constant(ok, K_lo, K_hi, "fit_minimal_lemma_K", why);
}

// ---- experiment orchestration ----

struct ExperimentConfig {
  DampingLaw law = make_linear_law();
  TimeWeight weight = make_constant_weight();
  DampingProfile profile;
  InitialData data = make_gaussian_bump(1.5, 0.1);
  double R = 2.0;
  double dr = 0.01;
  double dt = 0.009;
  double t_end = 0.0;  // 0: default 5T
  int sample_every = 20;
  double T = 0.0;  // 0: default 11R
  std::optional<double> K;
  double K_hi = 256.0;
  double rel_tol = 1e-8;
  double fit_t_lo = 0.0, fit_t_hi = 0.0;  // 0: default tail window
  bool use_local = true;
  bool check_bound = true;
  bool check_lemma = true;
  bool check_identity = true;
  double identity_tol = 1e-4;
  std::string out_dir;
};

struct ExperimentReport {
  double T = 0.0, dt = 0.0, t_end = 0.0;
  double Ma = 0.0, S0 = 0.0;
  double K_min = 0.0, K_used = 0.0;
  bool bound_holds = false;
  double worst_ratio = 0.0;
  bool lemma_ok = false;
  int lemma_windows = 0, lemma_violations = 0;
  double lemma_slack = 0.0;  // noise allowance actually applied
  double identity_residual = 0.0;
  double fitted_mu = 0.0;
  bool fit_valid = false, fit_nonpower = false;
  std::optional<RatePrediction> predicted;
  bool diverges = false;
  double divergence_integral = 0.0;
  bool outside_decay_regime = false;

  bool all_checks_pass(const ExperimentConfig& cfg) const {
    bool ok = true;
    if (cfg.check_bound) ok = ok && bound_holds;
    if (cfg.check_lemma) ok = ok && lemma_ok;
    if (cfg.check_identity) ok = ok && identity_residual <= cfg.identity_tol;
    return ok;
  }
};

inline ExperimentConfig experiment_from_config(const Config& cfg) {
  ExperimentConfig e;
  e.law = parse_damping_law(get_string(cfg, "law", "linear"));
  e.weight = parse_time_weight(get_string(cfg, "rho", "const"));
  e.R = get_real(cfg, "R", 2.0);
  e.profile.shape = get_string(cfg, "shape", "smooth") == "annulus"
                        ? DampingProfile::Shape::Annulus
                        : DampingProfile::Shape::SmoothBump;
  e.profile.r_a = get_real(cfg, "ra", 1.0 + 0.8 * (e.R - 1.0));
  e.profile.amplitude = get_real(cfg, "amp", 1.0);
  e.data = parse_initial_data(get_string(cfg, "data", "gaussian:c=1.5,w=0.1"));
  e.dr = get_real(cfg, "dr", 0.01);
  e.dt = get_real(cfg, "dt", 0.9 * e.dr);
  e.T = get_real(cfg, "T", 0.0);
  e.t_end = get_real(cfg, "t_end", 0.0);
  e.sample_every = get_int(cfg, "sample_every", 20);
  if (has_key(cfg, "K")) e.K = require_real(cfg, "K");
  e.K_hi = get_real(cfg, "K_hi", 256.0);
  e.rel_tol = get_real(cfg, "rel_tol", 1e-8);
  e.fit_t_lo = get_real(cfg, "fit_t_lo", 0.0);
  e.fit_t_hi = get_real(cfg, "fit_t_hi", 0.0);
  e.use_local = get_string(cfg, "W", "ER") != "Eu";
  e.check_bound = get_flag(cfg, "check_bound", true);
  e.check_lemma = get_flag(cfg, "check_lemma", true);
  e.check_identity = get_flag(cfg, "check_identity", true);
  e.identity_tol = get_real(cfg, "identity_tol", 1e-4);
  e.out_dir = get_string(cfg, "out", "");
  return e;
}

namespace detail {

// snap dt so that one observation window T is an exact multiple of
// sample_every steps: recorded rows then land on every multiple of T
inline double snap_dt(double T, double dt, int sample_every) {
  const double group = dt * sample_every;
  const int groups = static_cast<int>(std::ceil(T / group - 1e-12));
  return T / (static_cast<double>(groups) * sample_every);
}

}  // namespace detail

inline TimeSeries simulate(const ExperimentConfig& cfg, double dt, double t_end) {
  const RadialDomain dom = make_domain(cfg.R, cfg.dr, t_end);
  WaveSimulation sim(dom, cfg.profile, cfg.law, cfg.weight, cfg.data, dt);
  return sim.run(t_end, cfg.sample_every);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  const double T = cfg.T > 0.0 ? cfg.T : 11.0 * cfg.R;
  const double t_end = cfg.t_end > 0.0 ? cfg.t_end : 5.0 * T;
  const double dt = detail::snap_dt(T, cfg.dt, cfg.sample_every);
  rep.T = T;
  rep.dt = dt;
  rep.t_end = t_end;
  rep.Ma = cfg.profile.mass();

  TimeSeries series = simulate(cfg, dt, t_end);
  rep.S0 = series.rows.front().E_total;
  rep.identity_residual = energy_identity_residual(series);
  rep.lemma_slack = std::max(kDominationSlack, 10.0 * rep.identity_residual);

  EnvelopeProblem tmpl =
      make_envelope_problem(cfg.law, cfg.weight, T, 2.0, rep.Ma, std::max(rep.S0, 1e-300));
  tmpl.S0 = rep.S0;

  if (cfg.K) {
    rep.K_min = 0.0;
    rep.K_used = *cfg.K;
  } else {
    const double K_dom = fit_minimal_K(series, tmpl, 1.0 + 1e-6, cfg.K_hi, cfg.use_local);
    const double K_lem = fit_minimal_lemma_K(series, tmpl, rep.lemma_slack, 1.0 + 1e-6,
                                             cfg.K_hi, cfg.use_local);
    rep.K_min = std::max(K_dom, K_lem);
    rep.K_used = 2.0 * rep.K_min;
  }

  EnvelopeProblem prob = tmpl;
  prob.K = std::max(rep.K_used, 1.0 + 1e-9);
  DominationCheck dc = check_energy_domination(series, prob, cfg.rel_tol, cfg.use_local);
  rep.bound_holds = dc.holds;
  rep.worst_ratio = dc.worst_ratio;

  DiscreteLemmaCheck lc = check_discrete_lemma(series, prob, cfg.use_local, rep.lemma_slack);
  rep.lemma_ok = lc.ok;
  rep.lemma_windows = lc.windows;
  rep.lemma_violations = static_cast<int>(lc.violations.size());

  // tail exponent of the observed energy
  {
    const double t_hi = cfg.fit_t_hi > 0.0 ? cfg.fit_t_hi : t_end;
    const double t_lo = cfg.fit_t_lo > 0.0 ? cfg.fit_t_lo : std::max(T, (1.0 + t_hi) / 12.0);
    std::vector<double> ts, vs;
    for (const auto& row : series.rows) {
      ts.push_back(row.t);
      vs.push_back(cfg.use_local ? row.E_R : row.E_total);
    }
    try {
      const TailFit f = fit_tail_exponent(ts, vs, t_lo, t_hi);
      rep.fitted_mu = f.exponent;
      rep.fit_nonpower = f.nonpower;
      rep.fit_valid = true;
    } catch (const std::exception&) {
      rep.fit_valid = false;
    }
  }

  try {
    rep.predicted = predicted_rate(cfg.law, cfg.weight, T, prob.K);
  } catch (const std::invalid_argument&) {
    rep.predicted.reset();
  }

  {  // divergence of the envelope forcing: bounded integral = no decay claim
    const double T0 = std::max(10.0, 2.0 * T);
    DivergenceResult dv = divergence_check(prob, 0.01, T0, T0 * 4096.0);
    rep.diverges = dv.diverges;
    rep.divergence_integral = dv.integral;
    rep.outside_decay_regime = !dv.diverges;
  }

  if (!cfg.out_dir.empty()) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : series.rows) rows.push_back({r.t, r.E_total, r.E_R, r.D_cum});
    write_file(cfg.out_dir + "/series.csv", render_csv("t,E_total,E_R,D_cum", rows));

    EnvelopeTrajectory traj = integrate_envelope(
        prob, std::max(t_end - T, T), cfg.rel_tol, shifted_sample_times(series, T));
    rows.clear();
    for (const auto& s : traj.samples) rows.push_back({s.t, s.y});
    write_file(cfg.out_dir + "/envelope.csv", render_csv("t,S", rows));

    std::string report = "key,value\n";
    auto put = [&report](const std::string& k, double v) {
      report += k + "," + format_double(v) + "\n";
    };
    put("T", rep.T);
    put("dt", rep.dt);
    put("t_end", rep.t_end);
    put("Ma", rep.Ma);
    put("S0", rep.S0);
    put("K_min", rep.K_min);
    put("K_used", rep.K_used);
    put("bound_holds", rep.bound_holds ? 1.0 : 0.0);
    put("worst_ratio", rep.worst_ratio);
    put("lemma_ok", rep.lemma_ok ? 1.0 : 0.0);
    put("lemma_windows", rep.lemma_windows);
    put("lemma_violations", rep.lemma_violations);
    put("lemma_slack", rep.lemma_slack);
    put("identity_residual", rep.identity_residual);
    put("fitted_mu", rep.fit_valid ? rep.fitted_mu : std::nan(""));
    put("fit_nonpower", rep.fit_nonpower ? 1.0 : 0.0);
    if (rep.predicted) {
      report += "predicted_form," + rate_form_name(rep.predicted->form) + "\n";
      for (const auto& [k, v] : rep.predicted->constants) put("predicted_" + k, v);
    } else {
      report += "predicted_form,none\n";
    }
    put("diverges", rep.diverges ? 1.0 : 0.0);
    put("divergence_integral", rep.divergence_integral);
    put("outside_decay_regime", rep.outside_decay_regime ? 1.0 : 0.0);
    write_file(cfg.out_dir + "/report.csv", report);
  }

  return rep;
}

}  // namespace wavedecay
