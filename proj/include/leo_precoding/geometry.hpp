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

#ifndef LEO_PRECODING_GEOMETRY_HPP
#define LEO_PRECODING_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "leo_precoding/random.hpp"

namespace leo {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Physical scenario. Gains are linear power ratios; dB values are
/// converted once when a configuration is loaded.
struct ScenarioConfig {
  double sat_altitude = 600e3;        // m
  double inter_sat_distance = 10e3;   // m
  int num_sats = 2;                   // M
  int ants_per_sat = 2;               // N
  int num_users = 3;                  // K
  double wavelength = 0.15;           // m
  double inter_ant_distance = 0.225;  // m, 3/2 wavelength
  double mean_user_distance = 1000.0; // m
  double user_jitter_bound = 30.0;    // m
  double gain_sat = db_to_linear(14.0);
  double gain_user = db_to_linear(0.0);
  double total_power = 100.0;         // W
  double noise_power = 6e-13;         // W

  int antennas_total() const { return num_sats * ants_per_sat; }
  int state_dim() const { return 2 * num_sats * ants_per_sat * num_users; }
};

inline void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
  };
  require(c.num_sats >= 1 && c.ants_per_sat >= 1 && c.num_users >= 1, "M, N, K must be >= 1");
  require(c.sat_altitude > 0 && c.inter_sat_distance > 0, "altitude and satellite spacing must be positive");
  require(c.wavelength > 0 && c.inter_ant_distance > 0, "wavelength and antenna spacing must be positive");
  require(c.mean_user_distance > 0, "mean user distance must be positive");
  require(c.user_jitter_bound >= 0, "jitter bound must be non-negative");
  require(c.gain_sat > 0 && c.gain_user > 0, "gains must be positive");
  require(c.total_power > 0 && c.noise_power > 0, "powers must be positive");
  require(std::isfinite(c.sat_altitude + c.inter_sat_distance + c.wavelength + c.inter_ant_distance +
                        c.mean_user_distance + c.user_jitter_bound + c.gain_sat + c.gain_user +
                        c.total_power + c.noise_power),
          "non-finite parameter");
}

/// Positions in the along-track (x) / altitude (z) plane.
struct Placement {
  Eigen::VectorXd sat_x;   // M
  Eigen::VectorXd sat_z;   // M
  Eigen::VectorXd user_x;  // K
  Eigen::VectorXd user_z;  // K
};

/// Satellites centered over x = 0 at fixed altitude; users equally spaced by
/// the mean user distance around x = 0, each jittered uniformly in
/// [-jitter_bound, +jitter_bound].
inline Placement place_constellation(const ScenarioConfig& config, double jitter_bound, RandomStream& rng) {
  if (jitter_bound < 0) throw std::invalid_argument("jitter bound must be non-negative");
  const int m_count = config.num_sats;
  const int k_count = config.num_users;
  Placement p;
  p.sat_x.resize(m_count);
  p.sat_z = Eigen::VectorXd::Constant(m_count, config.sat_altitude);
  for (int m = 0; m < m_count; ++m) p.sat_x(m) = (m - 0.5 * (m_count - 1)) * config.inter_sat_distance;

  p.user_x.resize(k_count);
  p.user_z = Eigen::VectorXd::Zero(k_count);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < k_count; ++k) {
    const double nominal = (k - 0.5 * (k_count - 1)) * config.mean_user_distance;
    // Draw even at zero bound so stream consumption does not depend on it.
    const double u = unit(rng);
    p.user_x(k) = nominal + jitter_bound * u;
  }
  return p;
}

/// K x M Euclidean satellite-user distances.
inline Eigen::MatrixXd pair_distances(const Placement& p) {
  Eigen::MatrixXd d(p.user_x.size(), p.sat_x.size());
  for (Eigen::Index k = 0; k < d.rows(); ++k)
    for (Eigen::Index m = 0; m < d.cols(); ++m)
      d(k, m) = std::hypot(p.user_x(k) - p.sat_x(m), p.user_z(k) - p.sat_z(m));
  return d;
}

/// K x M cosines of the departure angle measured from the along-track array axis.
inline Eigen::MatrixXd aod_cosines(const Placement& p) {
  const Eigen::MatrixXd d = pair_distances(p);
  Eigen::MatrixXd c(d.rows(), d.cols());
  for (Eigen::Index k = 0; k < d.rows(); ++k)
    for (Eigen::Index m = 0; m < d.cols(); ++m)
      c(k, m) = std::clamp((p.user_x(k) - p.sat_x(m)) / d(k, m), -1.0, 1.0);
  return c;
}

}  // namespace leo

#endif  // LEO_PRECODING_GEOMETRY_HPP
