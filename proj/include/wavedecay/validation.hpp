#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wavedecay {

// One named property check. `value` is check-specific: a worst-case slack for
// inequality checks (>= 0 means the property held everywhere sampled) or a
// tightest fitted constant for checks that report one (C0, c0, ...).
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  const CheckResult* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace wavedecay
