// SPDX-License-Identifier: Apache-2.0
//
// leo-precoding: cooperative LEO downlink precoding with soft actor-critic
// Copyright (C) 2026 The leo-precoding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LEO_PRECODING_EXPERIMENT_HPP
#define LEO_PRECODING_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leo_precoding/channel.hpp"
#include "leo_precoding/geometry.hpp"
#include "leo_precoding/sac.hpp"

namespace leo {

enum class SweepKind { distance, error1, error2 };

inline std::vector<double> linspace(double start, double stop, int points) {
  if (points < 1) throw std::invalid_argument("linspace needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = points == 1 ? start : start + (stop - start) * i / (points - 1);
  return g;
}

struct SweepSettings {
  std::vector<double> distance_grid = linspace(900.0, 1100.0, 500);
  std::vector<double> error1_grid{0.0, 0.025, 0.05, 0.1, 0.2, 0.3};
  std::vector<double> error2_grid{0.0, 0.005, 0.01, 0.02, 0.05};
  double error2_delta_epsilon = 0.1;
  int monte_carlo_iterations = 10000;
};

struct ExperimentSpec {
  ScenarioConfig scenario;
  SacConfig sac;
  ErrorConfig training_error;
  SweepSettings sweep;
  std::uint64_t seed = 1;
  long long checkpoint_interval = 0;  // 0: final checkpoint only

  const std::vector<double>& grid(SweepKind kind) const {
    switch (kind) {
      case SweepKind::distance:
        return sweep.distance_grid;
      case SweepKind::error1:
        return sweep.error1_grid;
      case SweepKind::error2:
        return sweep.error2_grid;
    }
    throw std::logic_error("unknown sweep kind");
  }
};

inline void validate_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw std::invalid_argument(std::string(name) + " has a non-finite entry");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(name) + " must be strictly increasing");
  }
}

inline void validate(const ExperimentSpec& s) {
  validate(s.scenario);
  validate(s.sac);
  validate(s.training_error);
  validate_grid(s.sweep.distance_grid, "distance_grid");
  validate_grid(s.sweep.error1_grid, "error1_grid");
  validate_grid(s.sweep.error2_grid, "error2_grid");
  if (s.sweep.distance_grid.front() <= 0) throw std::invalid_argument("distance_grid must be positive");
  if (s.sweep.error1_grid.front() < 0 || s.sweep.error2_grid.front() < 0)
    throw std::invalid_argument("error grids must be non-negative");
  if (!(s.sweep.error2_delta_epsilon >= 0)) throw std::invalid_argument("error2_delta_epsilon must be >= 0");
  if (s.sweep.monte_carlo_iterations < 1) throw std::invalid_argument("monte_carlo_iterations must be >= 1");
  if (s.checkpoint_interval < 0) throw std::invalid_argument("checkpoint_interval must be >= 0");
}

inline ErrorModel parse_error_model(const std::string& name) {
  if (name == "none") return ErrorModel::none;
  if (name == "model1") return ErrorModel::model1;
  if (name == "model2") return ErrorModel::model2;
  throw std::invalid_argument("unknown error model '" + name + "' (expected none, model1, model2)");
}

inline std::string to_string(ErrorModel m) {
  switch (m) {
    case ErrorModel::none:
      return "none";
    case ErrorModel::model1:
      return "model1";
    case ErrorModel::model2:
      return "model2";
  }
  return "none";
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& section, const std::set<std::string>& known, const std::string& where) {
  if (!section.is_object()) throw std::invalid_argument("config section '" + where + "' must be an object");
  for (const auto& [key, _] : section.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + where + "." + key + "'");
}

template <typename T>
void read_opt(const json& section, const char* key, T& target) {
  if (section.contains(key)) target = section.at(key).get<T>();
}

inline std::vector<double> read_grid(const json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  if (v.is_object()) {
    reject_unknown(v, {"start", "stop", "points"}, "grid");
    return linspace(v.at("start").get<double>(), v.at("stop").get<double>(), v.at("points").get<int>());
  }
  throw std::invalid_argument("grid must be an array or {start, stop, points}");
}

}  // namespace detail

/// Builds an experiment from JSON text. Absent keys keep the defaults
/// (the reference LEO scenario); unknown keys are rejected. Gains are given
/// in dB and converted here.
inline ExperimentSpec parse_experiment(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentSpec s;
  try {
    detail::reject_unknown(root, {"seed", "scenario", "sac", "training_error", "sweep", "checkpoint_interval"}, "root");
    detail::read_opt(root, "seed", s.seed);
    detail::read_opt(root, "checkpoint_interval", s.checkpoint_interval);

    if (root.contains("scenario")) {
      const auto& j = root.at("scenario");
      detail::reject_unknown(j,
                             {"sat_altitude_m", "inter_sat_distance_m", "num_sats", "ants_per_sat", "num_users",
                              "wavelength_m", "inter_ant_distance_m", "inter_ant_distance_wavelengths",
                              "mean_user_distance_m", "user_jitter_bound_m", "gain_sat_dbi", "gain_user_dbi",
                              "total_power_w", "noise_power_w"},
                             "scenario");
      auto& c = s.scenario;
      detail::read_opt(j, "sat_altitude_m", c.sat_altitude);
      detail::read_opt(j, "inter_sat_distance_m", c.inter_sat_distance);
      detail::read_opt(j, "num_sats", c.num_sats);
      detail::read_opt(j, "ants_per_sat", c.ants_per_sat);
      detail::read_opt(j, "num_users", c.num_users);
      detail::read_opt(j, "wavelength_m", c.wavelength);
      if (j.contains("inter_ant_distance_m") && j.contains("inter_ant_distance_wavelengths"))
        throw std::invalid_argument("give either inter_ant_distance_m or inter_ant_distance_wavelengths");
      double spacing_wl = 1.5;
      detail::read_opt(j, "inter_ant_distance_wavelengths", spacing_wl);
      c.inter_ant_distance = spacing_wl * c.wavelength;
      detail::read_opt(j, "inter_ant_distance_m", c.inter_ant_distance);
      detail::read_opt(j, "mean_user_distance_m", c.mean_user_distance);
      detail::read_opt(j, "user_jitter_bound_m", c.user_jitter_bound);
      if (j.contains("gain_sat_dbi")) c.gain_sat = db_to_linear(j.at("gain_sat_dbi").get<double>());
      if (j.contains("gain_user_dbi")) c.gain_user = db_to_linear(j.at("gain_user_dbi").get<double>());
      detail::read_opt(j, "total_power_w", c.total_power);
      detail::read_opt(j, "noise_power_w", c.noise_power);
    }

    if (root.contains("sac")) {
      const auto& j = root.at("sac");
      detail::reject_unknown(j,
                             {"batch_size", "critic_lr", "actor_lr", "steps", "buffer_capacity", "hidden_layers",
                              "hidden_units", "entropy_target", "temperature_lr", "initial_log_temperature"},
                             "sac");
      auto& c = s.sac;
      detail::read_opt(j, "batch_size", c.batch_size);
      detail::read_opt(j, "critic_lr", c.critic_lr);
      detail::read_opt(j, "actor_lr", c.actor_lr);
      if (j.contains("steps")) c.steps = static_cast<long long>(j.at("steps").get<double>());
      if (j.contains("buffer_capacity")) c.buffer_capacity = static_cast<int>(j.at("buffer_capacity").get<double>());
      detail::read_opt(j, "hidden_layers", c.hidden_layers);
      detail::read_opt(j, "hidden_units", c.hidden_units);
      detail::read_opt(j, "entropy_target", c.entropy_target);
      detail::read_opt(j, "temperature_lr", c.temperature_lr);
      detail::read_opt(j, "initial_log_temperature", c.initial_log_temperature);
    }

    if (root.contains("training_error")) {
      const auto& j = root.at("training_error");
      detail::reject_unknown(j, {"model", "delta_epsilon", "sigma_zeta"}, "training_error");
      if (j.contains("model")) s.training_error.model = parse_error_model(j.at("model").get<std::string>());
      detail::read_opt(j, "delta_epsilon", s.training_error.delta_epsilon);
      detail::read_opt(j, "sigma_zeta", s.training_error.sigma_zeta);
    }

    if (root.contains("sweep")) {
      const auto& j = root.at("sweep");
      detail::reject_unknown(j,
                             {"distance_grid", "error1_grid", "error2_grid", "error2_delta_epsilon",
                              "monte_carlo_iterations"},
                             "sweep");
      if (j.contains("distance_grid")) s.sweep.distance_grid = detail::read_grid(j.at("distance_grid"));
      if (j.contains("error1_grid")) s.sweep.error1_grid = detail::read_grid(j.at("error1_grid"));
      if (j.contains("error2_grid")) s.sweep.error2_grid = detail::read_grid(j.at("error2_grid"));
      detail::read_opt(j, "error2_delta_epsilon", s.sweep.error2_delta_epsilon);
      detail::read_opt(j, "monte_carlo_iterations", s.sweep.monte_carlo_iterations);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config has a value of the wrong type: ") + e.what());
  }
  validate(s);
  return s;
}

inline ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_experiment(ss.str());
}

}  // namespace leo

#endif  // LEO_PRECODING_EXPERIMENT_HPP
