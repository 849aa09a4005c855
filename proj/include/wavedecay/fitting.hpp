#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wavedecay {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double corr = 0.0;  // Pearson correlation coefficient
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need two equal-length series, n >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.corr = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 1.0;
  return f;
}

// abscissa for tail fits: ln(1+t) for power-law shapes, ln(ln(2+t)) for
// log-power shapes
enum class FitAxis { Log1pT, LogLog2pT };

struct TailFit {
  double exponent = 0.0;
  double corr = 0.0;
  bool nonpower = false;  // slope drift between window halves: not a power law
  std::size_t n_used = 0;
};

// Least-squares slope of ln(values) against the chosen abscissa over samples
// with t in [t_lo, t_hi]. The window must span at least a decade in (1+t).
// Values must be strictly positive inside the window.
inline TailFit fit_tail_exponent(const std::vector<double>& t, const std::vector<double>& v,
                                 double t_lo, double t_hi, FitAxis axis = FitAxis::Log1pT) {
  if (t.size() != v.size()) throw std::invalid_argument("fit_tail_exponent: length mismatch");
  if (!(t_hi > t_lo && t_lo >= 0.0))
    throw std::invalid_argument("fit_tail_exponent: bad window");
  if ((1.0 + t_hi) < 10.0 * (1.0 + t_lo) * (1.0 - 1e-12))
    throw std::invalid_argument("fit_tail_exponent: window narrower than a decade in 1+t");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(v[i] > 0.0))
      throw std::runtime_error("fit_tail_exponent: non-positive value inside the window");
    const double x =
        axis == FitAxis::Log1pT ? std::log1p(t[i]) : std::log(std::log(2.0 + t[i]));
    xs.push_back(x);
    ys.push_back(std::log(v[i]));
  }
  if (xs.size() < 5)
    throw std::runtime_error("fit_tail_exponent: fewer than 5 samples in the window");

  const LinearFit full = linear_fit(xs, ys);

  // slope drift across window halves flags non-power-law decay
  const double x_mid = 0.5 * (xs.front() + xs.back());
  std::vector<double> x1, y1, x2, y2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= x_mid)
      x1.push_back(xs[i]), y1.push_back(ys[i]);
    else
      x2.push_back(xs[i]), y2.push_back(ys[i]);
  }
  bool drift = false;
  if (x1.size() >= 2 && x2.size() >= 2) {
    const double s1 = linear_fit(x1, y1).slope;
    const double s2 = linear_fit(x2, y2).slope;
    drift = std::abs(s2 - s1) > std::max(0.2 * std::abs(full.slope), 1e-6);
  }

  return {full.slope, full.corr, drift, xs.size()};
}

}  // namespace wavedecay
