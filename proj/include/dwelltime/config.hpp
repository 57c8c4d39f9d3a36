#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dwelltime/errors.hpp"
#include "dwelltime/operational.hpp"
#include "dwelltime/quantities.hpp"

namespace dwelltime {

// A laser setting in units of gamma.
struct LaserSetting {
  double delta_over_gamma;
  double omega_over_gamma;
};

enum class UnitSystem { si, natural };

// Resolved sweep configuration. Velocities and heights are stored in the
// internal unit system (SI, or hbar = 1 natural units).
struct SweepConfig {
  UnitSystem units = UnitSystem::si;
  PhysicalConstants constants = kSI;
  ParticleSpec particle{kCesium133Mass, "Cs"};
  double region_length = 2.0e-6;
  double barrier_height = energy_for_velocity(0.28 * kCentimetrePerSecond, kCesium133Mass);
  double velocity_min = 0.05 * kCentimetrePerSecond;
  double velocity_max = 1.0 * kCentimetrePerSecond;
  std::size_t velocity_points = 400;
  // Output scale: reported velocity = internal velocity / velocity_scale.
  double velocity_scale = kCentimetrePerSecond;
  std::string velocity_unit = "cm/s";
  double gamma = kDefaultGamma;
  double wavelength = kCesiumD2Wavelength;
  std::vector<LaserSetting> lasers{{2500.0, 1.57}, {250.0, 0.5}, {25.0, 0.16}, {2.5, 0.05}};
  LightShiftConvention convention = LightShiftConvention::barrier_is_lightshift;
  double fig2_ratio_min = 1e-4;
  double fig2_ratio_max = 3.0;
  std::size_t fig2_points = 241;
  double single_photon_threshold = 0.1;

  RegionSpec region() const { return {0.0, region_length}; }
  LaserParams laser(const LaserSetting& s) const {
    return LaserParams::in_gamma_units(s.delta_over_gamma, s.omega_over_gamma, gamma, wavelength);
  }
  std::vector<double> velocity_grid() const {
    std::vector<double> grid(velocity_points);
    for (std::size_t i = 0; i < velocity_points; ++i)
      grid[i] = velocity_min + (velocity_max - velocity_min) * static_cast<double>(i) /
                                   static_cast<double>(velocity_points - 1);
    return grid;
  }
};

inline const char* to_string(LightShiftConvention c) {
  return c == LightShiftConvention::barrier_is_lightshift ? "barrier-is-lightshift"
                                                          : "barrier-plus-lightshift";
}

inline LightShiftConvention parse_convention(std::string_view text) {
  if (text == "barrier-is-lightshift") return LightShiftConvention::barrier_is_lightshift;
  if (text == "barrier-plus-lightshift") return LightShiftConvention::barrier_plus_lightshift;
  throw ConfigError("convention: expected barrier-is-lightshift or barrier-plus-lightshift, got '" +
                    std::string(text) + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct RawEntry {
  std::string value;
  int line;
};

inline double parse_number(const std::string& key, const RawEntry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + ": '" + e.value +
                      "' is not a finite number");
  return v;
}

inline std::size_t parse_count(const std::string& key, const RawEntry& e) {
  const double v = parse_number(key, e);
  if (v != std::floor(v) || v < 0.0 || v > 1e8)
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + ": '" + e.value +
                      "' is not a valid count");
  return static_cast<std::size_t>(v);
}

inline std::vector<LaserSetting> parse_lasers(const RawEntry& e) {
  std::vector<LaserSetting> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw ConfigError("line " + std::to_string(e.line) +
                        ": lasers: expected 'delta/gamma:omega/gamma' entries, got '" + t + "'");
    const double d = parse_number("lasers", {trim(t.substr(0, colon)), e.line});
    const double o = parse_number("lasers", {trim(t.substr(colon + 1)), e.line});
    if (!(d > 0.0) || !(o > 0.0))
      throw ConfigError("line " + std::to_string(e.line) + ": lasers: settings must be positive");
    out.push_back({d, o});
  }
  if (out.empty())
    throw ConfigError("line " + std::to_string(e.line) + ": lasers: at least one setting needed");
  return out;
}

}  // namespace detail

// Parses the flat `key = value` format ('#' starts a comment). Every key is
// optional; missing keys keep the Cs / 2 um / 0.28 cm/s defaults.
inline SweepConfig parse_config(std::istream& in) {
  static const std::vector<std::string> known{
      "units",          "species",         "mass",          "region_length",
      "barrier_velocity", "barrier_height", "velocity_min",  "velocity_max",
      "velocity_points", "velocity_units", "gamma",         "wavelength",
      "lasers",         "convention",      "fig2_ratio_min", "fig2_ratio_max",
      "fig2_points",    "single_photon_threshold"};
  std::map<std::string, detail::RawEntry> raw;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (value.empty())
      throw ConfigError("line " + std::to_string(number) + ": " + key + ": empty value");
    if (!raw.emplace(key, detail::RawEntry{value, number}).second)
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
  }

  auto has = [&](const char* key) { return raw.count(key) > 0; };
  auto number_of = [&](const char* key) { return detail::parse_number(key, raw.at(key)); };
  auto fail = [&](const char* key, const std::string& why) -> ConfigError {
    const std::string where = has(key) ? "line " + std::to_string(raw.at(key).line) + ": " : "";
    return ConfigError(where + key + ": " + why);
  };

  SweepConfig cfg;
  if (has("units")) {
    const std::string& u = raw.at("units").value;
    if (u == "natural") {
      cfg.units = UnitSystem::natural;
    } else if (u != "si") {
      throw fail("units", "expected si or natural");
    }
  }
  const bool natural = cfg.units == UnitSystem::natural;
  if (natural) {
    // Natural units: hbar = 1, and unset scales default to 1 with no barrier.
    cfg.constants = kNatural;
    cfg.particle = {1.0, "natural"};
    cfg.region_length = 1.0;
    cfg.barrier_height = 0.0;
    cfg.velocity_min = 0.05;
    cfg.velocity_max = 10.0;
    cfg.velocity_scale = 1.0;
    cfg.velocity_unit = "natural";
  }

  if (has("species")) {
    const std::string& s = raw.at("species").value;
    if (s == "Cs") {
      if (natural) throw fail("species", "Cs requires si units");
      cfg.particle = {kCesium133Mass, "Cs"};
    } else if (s == "custom") {
      if (!has("mass")) throw fail("species", "custom species needs a mass");
      cfg.particle.label = "custom";
    } else {
      throw fail("species", "expected Cs or custom");
    }
  }
  if (has("mass")) {
    cfg.particle.mass = number_of("mass");
    if (!(cfg.particle.mass > 0.0)) throw fail("mass", "must be positive");
    if (cfg.particle.label == "Cs") cfg.particle.label = "custom";
  }
  if (has("region_length")) {
    cfg.region_length = number_of("region_length");
    if (!(cfg.region_length > 0.0)) throw fail("region_length", "must be positive");
  }

  if (has("velocity_units")) {
    const std::string& u = raw.at("velocity_units").value;
    if (natural != (u == "natural"))
      throw fail("velocity_units", "natural velocity units go with units = natural");
    if (u == "cm/s") {
      cfg.velocity_scale = kCentimetrePerSecond;
    } else if (u == "m/s") {
      cfg.velocity_scale = 1.0;
    } else if (u != "natural") {
      throw fail("velocity_units", "expected cm/s, m/s or natural");
    }
    cfg.velocity_unit = u;
  }
  if (has("barrier_velocity") && has("barrier_height"))
    throw fail("barrier_height", "give either barrier_velocity or barrier_height, not both");
  if (has("barrier_velocity")) {
    const double v = number_of("barrier_velocity");
    if (v < 0.0) throw fail("barrier_velocity", "must be non-negative");
    cfg.barrier_height = energy_for_velocity(v * cfg.velocity_scale, cfg.particle.mass);
  } else if (has("barrier_height")) {
    cfg.barrier_height = number_of("barrier_height");
  } else if (!natural) {
    cfg.barrier_height = energy_for_velocity(0.28 * kCentimetrePerSecond, cfg.particle.mass);
  }

  if (has("velocity_min")) cfg.velocity_min = number_of("velocity_min") * cfg.velocity_scale;
  if (has("velocity_max")) cfg.velocity_max = number_of("velocity_max") * cfg.velocity_scale;
  if (has("velocity_points")) cfg.velocity_points = detail::parse_count("velocity_points", raw.at("velocity_points"));
  if (!(cfg.velocity_min > 0.0)) throw fail("velocity_min", "must be positive");
  if (!(cfg.velocity_max > cfg.velocity_min))
    throw fail("velocity_max", "must exceed velocity_min");
  if (cfg.velocity_points < 2) throw fail("velocity_points", "need at least 2 points");

  if (has("gamma")) {
    cfg.gamma = number_of("gamma");
    if (!(cfg.gamma > 0.0)) throw fail("gamma", "must be positive");
  }
  if (has("wavelength")) {
    cfg.wavelength = number_of("wavelength");
    if (!(cfg.wavelength > 0.0)) throw fail("wavelength", "must be positive");
  }
  if (has("lasers")) cfg.lasers = detail::parse_lasers(raw.at("lasers"));
  if (has("convention")) {
    try {
      cfg.convention = parse_convention(raw.at("convention").value);
    } catch (const ConfigError& e) {
      throw fail("convention", e.what());
    }
  }
  if (has("fig2_ratio_min")) cfg.fig2_ratio_min = number_of("fig2_ratio_min");
  if (has("fig2_ratio_max")) cfg.fig2_ratio_max = number_of("fig2_ratio_max");
  if (has("fig2_points")) cfg.fig2_points = detail::parse_count("fig2_points", raw.at("fig2_points"));
  if (!(cfg.fig2_ratio_min > 0.0)) throw fail("fig2_ratio_min", "must be positive");
  if (!(cfg.fig2_ratio_max > cfg.fig2_ratio_min))
    throw fail("fig2_ratio_max", "must exceed fig2_ratio_min");
  if (cfg.fig2_points < 2) throw fail("fig2_points", "need at least 2 points");
  if (has("single_photon_threshold")) {
    cfg.single_photon_threshold = number_of("single_photon_threshold");
    if (!(cfg.single_photon_threshold > 0.0))
      throw fail("single_photon_threshold", "must be positive");
  }
  return cfg;
}

inline SweepConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace dwelltime
