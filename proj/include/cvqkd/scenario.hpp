#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cvqkd/channel.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/state_builder.hpp"

namespace cvqkd {

/// Evenly spaced attenuation grid in dB, endpoints inclusive.
struct AttenuationGrid {
  double start_db = 0.0;
  double stop_db = 0.0;
  double step_db = 0.0;

  int size() const { return static_cast<int>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1; }
  double point(int i) const { return start_db + i * step_db; }
};

inline void validate(const AttenuationGrid& grid) {
  if (!(grid.step_db > 0.0))
    throw ConfigError("grid_step_db must be positive, got " + std::to_string(grid.step_db));
  if (!(grid.stop_db >= grid.start_db))
    throw ConfigError("grid_stop_db must be >= grid_start_db");
  if (!(grid.start_db >= 0.0))
    throw ConfigError("grid_start_db must be >= 0, got " + std::to_string(grid.start_db));
}

/// One batch scenario: preparation statistics, a channel (fixed eta or an
/// attenuation grid) with excess noise, and the measurement protocol.
struct Scenario {
  MeasuredPreparationStats stats;
  double epsilon = 0.0;
  std::optional<double> eta;
  std::optional<AttenuationGrid> grid;
  ProtocolConfig protocol;
};

namespace detail {

inline std::string_view trim_config(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_config_number(const std::string& key, std::string_view value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out))
    throw ConfigError("invalid numeric value for key '" + key + "': '" + std::string(value) + "'");
  return out;
}

}  // namespace detail

/// Parses the flat key=value scenario format ('#' starts a comment).
///
/// Required keys: V_M_x, V_M_p, V_B_x, V_B_p, C_MB_x, C_MB_p, detection, and
/// either eta or the grid_start_db/grid_stop_db/grid_step_db triple.
/// Optional: epsilon (default 0), quadrature (homodyne only, default x),
/// log_base (2|e, default 2), beta (default 1).
inline Scenario parse_scenario(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = detail::trim_config(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" +
                        std::string(view) + "'");
    const std::string key(detail::trim_config(view.substr(0, eq)));
    const std::string value(detail::trim_config(view.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!entries.emplace(key, value).second)
      throw ConfigError("duplicate key '" + key + "'");
  }

  const auto take = [&entries](const std::string& key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string value = it->second;
    entries.erase(it);
    return value;
  };
  const auto require_number = [&take](const std::string& key) {
    const auto value = take(key);
    if (!value) throw ConfigError("missing required key '" + key + "'");
    return detail::parse_config_number(key, *value);
  };

  Scenario scenario;
  scenario.stats.V_M_x = require_number("V_M_x");
  scenario.stats.V_M_p = require_number("V_M_p");
  scenario.stats.V_B_x = require_number("V_B_x");
  scenario.stats.V_B_p = require_number("V_B_p");
  scenario.stats.C_MB_x = require_number("C_MB_x");
  scenario.stats.C_MB_p = require_number("C_MB_p");

  if (const auto eps = take("epsilon")) {
    scenario.epsilon = detail::parse_config_number("epsilon", *eps);
    if (!(scenario.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  }

  const auto eta = take("eta");
  const auto grid_start = take("grid_start_db");
  const auto grid_stop = take("grid_stop_db");
  const auto grid_step = take("grid_step_db");
  const bool has_grid = grid_start || grid_stop || grid_step;
  if (eta && has_grid) throw ConfigError("specify either 'eta' or the grid keys, not both");
  if (eta) {
    scenario.eta = detail::parse_config_number("eta", *eta);
    if (!(*scenario.eta > 0.0 && *scenario.eta <= 1.0))
      throw ConfigError("eta must lie in (0,1], got " + std::to_string(*scenario.eta));
  } else if (has_grid) {
    if (!grid_start) throw ConfigError("missing required key 'grid_start_db'");
    if (!grid_stop) throw ConfigError("missing required key 'grid_stop_db'");
    if (!grid_step) throw ConfigError("missing required key 'grid_step_db'");
    AttenuationGrid grid;
    grid.start_db = detail::parse_config_number("grid_start_db", *grid_start);
    grid.stop_db = detail::parse_config_number("grid_stop_db", *grid_stop);
    grid.step_db = detail::parse_config_number("grid_step_db", *grid_step);
    validate(grid);
    scenario.grid = grid;
  } else {
    throw ConfigError("missing required key 'eta' (or grid_start_db/grid_stop_db/grid_step_db)");
  }

  const auto detection = take("detection");
  if (!detection) throw ConfigError("missing required key 'detection'");
  if (*detection == "homodyne")
    scenario.protocol.detection = Detection::homodyne;
  else if (*detection == "heterodyne")
    scenario.protocol.detection = Detection::heterodyne;
  else
    throw ConfigError("detection must be 'homodyne' or 'heterodyne', got '" + *detection + "'");

  if (const auto quadrature = take("quadrature")) {
    if (scenario.protocol.detection != Detection::homodyne)
      throw ConfigError("'quadrature' applies to homodyne detection only");
    if (*quadrature == "x")
      scenario.protocol.measured_quadrature = Quadrature::x;
    else if (*quadrature == "p")
      scenario.protocol.measured_quadrature = Quadrature::p;
    else
      throw ConfigError("quadrature must be 'x' or 'p', got '" + *quadrature + "'");
  }

  if (const auto base = take("log_base")) {
    if (*base == "2")
      scenario.protocol.log_base = LogBase::two;
    else if (*base == "e")
      scenario.protocol.log_base = LogBase::e;
    else
      throw ConfigError("log_base must be '2' or 'e', got '" + *base + "'");
  }

  if (const auto beta = take("beta")) {
    scenario.protocol.reconciliation_efficiency = detail::parse_config_number("beta", *beta);
    if (!(scenario.protocol.reconciliation_efficiency > 0.0 &&
          scenario.protocol.reconciliation_efficiency <= 1.0))
      throw ConfigError("beta must lie in (0,1]");
  }

  if (!entries.empty()) throw ConfigError("unknown key '" + entries.begin()->first + "'");

  validate(scenario.stats);  // surfaces bad values with the offending field named
  return scenario;
}

}  // namespace cvqkd
