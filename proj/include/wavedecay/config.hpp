#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavedecay/damping.hpp"
#include "wavedecay/time_weight.hpp"
#include "wavedecay/wave.hpp"

namespace wavedecay {

// Flat key=value configuration: one pair per line, '#' starts a comment,
// blank lines ignored, whitespace around keys and values trimmed.
using Config = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg[key] = val;
  }
  return cfg;
}

inline Config parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

// "key=value" overrides given on the command line take precedence
inline void apply_overrides(Config& cfg, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("override must be key=value: '" + o + "'");
    cfg[detail::trim(o.substr(0, eq))] = detail::trim(o.substr(eq + 1));
  }
}

inline bool has_key(const Config& cfg, const std::string& key) { return cfg.count(key) > 0; }

inline std::string get_string(const Config& cfg, const std::string& key,
                              const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

inline double get_real(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key + "': not a number: '" + it->second + "'");
  return v;
}

inline double require_real(const Config& cfg, const std::string& key) {
  if (!has_key(cfg, key)) throw std::invalid_argument("config key '" + key + "' is required");
  return get_real(cfg, key, 0.0);
}

inline int get_int(const Config& cfg, const std::string& key, int fallback) {
  const double v = get_real(cfg, key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config key '" + key + "': not an integer");
  return i;
}

inline bool get_flag(const Config& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (it->second == "1" || it->second == "true" || it->second == "yes") return true;
  if (it->second == "0" || it->second == "false" || it->second == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean");
}

namespace detail {

// "name:k1=v1,k2=v2" -> (name, {k1:v1, k2:v2})
inline std::pair<std::string, std::map<std::string, double>> parse_tagged(
    const std::string& spec) {
  const auto colon = spec.find(':');
  std::pair<std::string, std::map<std::string, double>> out;
  out.first = trim(colon == std::string::npos ? spec : spec.substr(0, colon));
  if (colon == std::string::npos) return out;
  std::istringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed parameter in '" + spec + "'");
    char* end = nullptr;
    const std::string vs = trim(item.substr(eq + 1));
    const double v = std::strtod(vs.c_str(), &end);
    if (end == vs.c_str() || *end != '\0')
      throw std::invalid_argument("malformed number in '" + spec + "'");
    out.second[trim(item.substr(0, eq))] = v;
  }
  return out;
}

inline double need_param(const std::map<std::string, double>& kv, const std::string& name,
                         const std::string& spec) {
  const auto it = kv.find(name);
  if (it == kv.end())
    throw std::invalid_argument("'" + spec + "': missing parameter '" + name + "'");
  return it->second;
}

}  // namespace detail

// law strings: "linear" | "superlinear:r0=<real>" | "sublinear:theta0=<real>"
//            | "exp-origin"
inline DampingLaw parse_damping_law(const std::string& spec) {
  auto [name, kv] = detail::parse_tagged(spec);
  if (name == "linear") return make_linear_law();
  if (name == "superlinear") return make_superlinear_law(detail::need_param(kv, "r0", spec));
  if (name == "sublinear")
    return make_sublinear_law(detail::need_param(kv, "theta0", spec));
  if (name == "exp-origin") return make_exp_origin_law();
  throw std::invalid_argument("unknown damping law '" + spec + "'");
}

// rho strings: "power:tau=<real>" | "const"
inline TimeWeight parse_time_weight(const std::string& spec) {
  auto [name, kv] = detail::parse_tagged(spec);
  if (name == "const") return make_constant_weight();
  if (name == "power") return make_power_weight(detail::need_param(kv, "tau", spec));
  throw std::invalid_argument("unknown time weight '" + spec + "'");
}

// data strings: "gaussian:c=<real>,w=<real>" | "outgoing:c=<real>,w=<real>"
inline InitialData parse_initial_data(const std::string& spec) {
  auto [name, kv] = detail::parse_tagged(spec);
  if (name == "gaussian")
    return make_gaussian_bump(detail::need_param(kv, "c", spec),
                              detail::need_param(kv, "w", spec));
  if (name == "outgoing")
    return make_outgoing_pulse(detail::need_param(kv, "c", spec),
                               detail::need_param(kv, "w", spec));
  throw std::invalid_argument("unknown initial data '" + spec + "'");
}

}  // namespace wavedecay
