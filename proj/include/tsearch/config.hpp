#pragma once

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsearch/scenario.hpp"
#include "tsearch/simulator.hpp"

namespace tsearch {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_double(const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("bad number '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("bad integer '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("bad boolean '" + v + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Field {
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

inline const std::vector<std::pair<std::string, Field>>& config_fields() {
  auto dbl = [](auto getter) {
    return Field{[getter](SimConfig& c, const std::string& v) { getter(c) = parse_double(v); },
                 [getter](const SimConfig& c) {
                   SimConfig copy = c;
                   return fmt_num(getter(copy));
                 }};
  };
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"d_max", dbl([](SimConfig& c) -> double& { return c.map.d_max; })},
      {"lidar_range", dbl([](SimConfig& c) -> double& { return c.map.lidar_range; })},
      {"camera_hfov_deg", dbl([](SimConfig& c) -> double& { return c.map.camera_hfov_deg; })},
      {"camera_vfov_deg", dbl([](SimConfig& c) -> double& { return c.map.camera_vfov_deg; })},
      {"band_min_z", dbl([](SimConfig& c) -> double& { return c.map.band_min_z; })},
      {"band_max_z", dbl([](SimConfig& c) -> double& { return c.map.band_max_z; })},
      {"lidar_azimuth_res_deg", dbl([](SimConfig& c) -> double& { return c.lidar.azimuth_res_deg; })},
      {"lidar_elevation_res_deg",
       dbl([](SimConfig& c) -> double& { return c.lidar.elevation_res_deg; })},
      {"lidar_elevation_min_deg",
       dbl([](SimConfig& c) -> double& { return c.lidar.elevation_min_deg; })},
      {"lidar_elevation_max_deg",
       dbl([](SimConfig& c) -> double& { return c.lidar.elevation_max_deg; })},
      {"v_max", dbl([](SimConfig& c) -> double& { return c.motion.v_max; })},
      {"a_max", dbl([](SimConfig& c) -> double& { return c.motion.a_max; })},
      {"w_max", dbl([](SimConfig& c) -> double& { return c.motion.w_max; })},
      {"w_uni", dbl([](SimConfig& c) -> double& { return c.weights.w_uni; })},
      {"w_unk", dbl([](SimConfig& c) -> double& { return c.weights.w_unk; })},
      {"sample_radii",
       Field{[](SimConfig& c, const std::string& v) {
               c.sampling.radii.clear();
               std::istringstream ls(v);
               std::string tok;
               while (std::getline(ls, tok, ','))
                 c.sampling.radii.push_back(parse_double(trim(tok)));
             },
             [](const SimConfig& c) {
               std::string s;
               for (std::size_t k = 0; k < c.sampling.radii.size(); ++k)
                 s += (k ? "," : "") + fmt_num(c.sampling.radii[k]);
               return s;
             }}},
      {"sample_azimuths",
       Field{[](SimConfig& c, const std::string& v) {
               c.sampling.n_azimuth = static_cast<int>(parse_int(v));
             },
             [](const SimConfig& c) { return std::to_string(c.sampling.n_azimuth); }}},
      {"split_threshold", dbl([](SimConfig& c) -> double& { return c.split_threshold; })},
      {"r_vp", dbl([](SimConfig& c) -> double& { return c.r_vp; })},
      {"d_anchor", dbl([](SimConfig& c) -> double& { return c.d_anchor; })},
      {"d_cost_threshold", dbl([](SimConfig& c) -> double& { return c.d_cost_threshold; })},
      {"agent_radius", dbl([](SimConfig& c) -> double& { return c.agent_radius; })},
      {"resolution", dbl([](SimConfig& c) -> double& { return c.resolution; })},
      {"sense_interval", dbl([](SimConfig& c) -> double& { return c.sense_interval; })},
      {"budget", dbl([](SimConfig& c) -> double& { return c.budget; })},
      {"start_jitter", dbl([](SimConfig& c) -> double& { return c.start_jitter; })},
      {"replan_trigger",
       Field{[](SimConfig& c, const std::string& v) {
               if (v == "every_segment") c.replan_trigger = ReplanTrigger::EverySegment;
               else if (v == "every_map_change") c.replan_trigger = ReplanTrigger::EveryMapChange;
               else throw ConfigError("expected every_segment or every_map_change");
             },
             [](const SimConfig& c) {
               return std::string(c.replan_trigger == ReplanTrigger::EverySegment
                                      ? "every_segment"
                                      : "every_map_change");
             }}},
      {"toggle_vc",
       Field{[](SimConfig& c, const std::string& v) { c.toggle_vc = parse_bool(v); },
             [](const SimConfig& c) { return std::string(c.toggle_vc ? "true" : "false"); }}},
      {"toggle_hagp",
       Field{[](SimConfig& c, const std::string& v) { c.toggle_hagp = parse_bool(v); },
             [](const SimConfig& c) { return std::string(c.toggle_hagp ? "true" : "false"); }}},
      {"seed",
       Field{[](SimConfig& c, const std::string& v) {
               c.seed = static_cast<std::uint64_t>(parse_int(v));
             },
             [](const SimConfig& c) { return std::to_string(c.seed); }}},
      {"reachable_stride",
       Field{[](SimConfig& c, const std::string& v) {
               c.reachable_stride = static_cast<int>(parse_int(v));
             },
             [](const SimConfig& c) { return std::to_string(c.reachable_stride); }}},
      {"max_cycles",
       Field{[](SimConfig& c, const std::string& v) {
               c.max_cycles = static_cast<std::size_t>(parse_int(v));
             },
             [](const SimConfig& c) { return std::to_string(c.max_cycles); }}},
  };
  return fields;
}

}  // namespace detail

/// `key = value` lines, `#` comments. Unknown keys are errors. Keys not
/// present keep the values already in `cfg`.
inline void parse_config(std::istream& is, SimConfig& cfg) {
  const auto& fields = detail::config_fields();
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = detail::trim(raw.substr(0, eq));
    const std::string val = detail::trim(raw.substr(eq + 1));
    bool found = false;
    for (const auto& [name, f] : fields) {
      if (name != key) continue;
      found = true;
      try {
        f.set(cfg, val);
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "': " + e.what());
      }
    }
    if (!found) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  cfg.sampling.clearance = cfg.agent_radius;
}

inline SimConfig load_config(const std::string& path) {
  SimConfig cfg;
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  parse_config(f, cfg);
  return cfg;
}

inline void write_config(const SimConfig& cfg, std::ostream& os) {
  for (const auto& [name, f] : detail::config_fields()) os << name << " = " << f.get(cfg) << '\n';
}

/// Scenario-owned settings: the height band, and the resolution unless the
/// config overrides it.
inline void apply_scenario(SimConfig& cfg, const Scenario& s) {
  if (s.band) {
    cfg.map.band_min_z = (*s.band)[0];
    cfg.map.band_max_z = (*s.band)[1];
  }
}

}  // namespace tsearch
