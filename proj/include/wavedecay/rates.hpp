#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "wavedecay/damping.hpp"
#include "wavedecay/time_weight.hpp"

namespace wavedecay {

// Predicted asymptotic decay shapes for the envelope, by (law family, tau):
//
//   ExpOfIntegral: S ~ exp(-c * integral_0^t rho)          (linear laws, |tau| < 1)
//   PowerLaw:      S ~ (1+t)^mu
//   LogPower:      S ~ (ln(2+t))^p                         (boundary tau values)
//   InverseLog:    S ~ C / ln(2 + t/(KT))                  (exp-origin laws)
//   LogLog:        S ~ C / ln(2 + ln(1+t)/(KT))            (exp-origin, tau = -1)

enum class RateForm { ExpOfIntegral, PowerLaw, LogPower, LogLog, InverseLog };

struct RatePrediction {
  RateForm form = RateForm::PowerLaw;
  std::map<std::string, double> constants;
};

inline std::string rate_form_name(RateForm f) {
  switch (f) {
    case RateForm::ExpOfIntegral: return "exp-of-integral";
    case RateForm::PowerLaw: return "power-law";
    case RateForm::LogPower: return "log-power";
    case RateForm::LogLog: return "log-log";
    case RateForm::InverseLog: return "inverse-log";
  }
  return "?";
}

namespace detail {

[[noreturn]] inline void unsupported_rate(const DampingLaw& law, double tau) {
  throw std::invalid_argument(
      "predicted_rate: no covered table entry for family=" + family_name(law.family) +
      ", tau=" + std::to_string(tau) +
      ". Covered: linear with |tau| <= 1; superlinear(r0) with tau in [-1, 1/r0]; "
      "sublinear(theta0) with tau in [-1, theta0]; exp-origin with tau in [-1, 0].");
}

}  // namespace detail

inline RatePrediction predicted_rate(const DampingLaw& law, const TimeWeight& w, double T,
                                     double K) {
  if (!(T > 0.0 && K > 1.0)) throw std::invalid_argument("predicted_rate: need T > 0, K > 1");
  const double tau = w.family == WeightFamily::Constant ? 0.0 : w.tau;
  RatePrediction r;

  switch (law.family) {
    case DampingFamily::Linear: {
      if (tau == -1.0) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -1.0 / (K * T);
      } else if (tau == 1.0) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -shift_constants(w, T).c0 / (K * T);
      } else if (std::abs(tau) < 1.0) {
        r.form = RateForm::ExpOfIntegral;
        r.constants["rate"] = 1.0 / (K * T);
        r.constants["integral_exponent"] = 1.0 - std::abs(tau);
      } else {
        detail::unsupported_rate(law, tau);  // |tau| > 1: outside the decay regime
      }
      return r;
    }
    case DampingFamily::SuperlinearPower: {
      const double r0 = law.exponent;
      if (tau == -1.0 || tau == 1.0 / r0) {
        r.form = RateForm::LogPower;
        r.constants["p"] = -2.0 / (r0 - 1.0);
      } else if (tau > -1.0 && tau <= 0.0) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -2.0 * (1.0 + tau) / (r0 - 1.0);
      } else if (tau >= 0.0 && tau < 1.0 / r0) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -2.0 * (1.0 - tau * r0) / (r0 - 1.0);
      } else {
        detail::unsupported_rate(law, tau);
      }
      return r;
    }
    case DampingFamily::SublinearPower: {
      const double th = law.exponent;
      if (tau == -1.0 || tau == th) {
        r.form = RateForm::LogPower;
        r.constants["p"] = -2.0 * th / (1.0 - th);
      } else if (tau > -1.0 && tau <= 0.0) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -2.0 * th * (1.0 + tau) / (1.0 - th);
      } else if (tau >= 0.0 && tau < th) {
        r.form = RateForm::PowerLaw;
        r.constants["mu"] = -2.0 * th * (1.0 - tau / th) / (1.0 - th);
      } else {
        detail::unsupported_rate(law, tau);
      }
      return r;
    }
    case DampingFamily::ExponentialOrigin: {
      if (tau == -1.0) {
        r.form = RateForm::LogLog;
        r.constants["scale"] = K * T;
      } else if (tau > -1.0 && tau <= 0.0) {
        r.form = RateForm::InverseLog;
        r.constants["scale"] = K * T;
      } else {
        detail::unsupported_rate(law, tau);
      }
      return r;
    }
  }
  throw std::logic_error("predicted_rate: unreachable");
}

}  // namespace wavedecay
