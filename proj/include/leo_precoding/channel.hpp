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

#ifndef LEO_PRECODING_CHANNEL_HPP
#define LEO_PRECODING_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "leo_precoding/geometry.hpp"
#include "leo_precoding/random.hpp"

namespace leo {

using cd = std::complex<double>;

/// K x (M*N) downlink channel. Row k is [h_{k,1} ... h_{k,M}], each block
/// holding the N antenna entries of one satellite.
struct ChannelMatrix {
  Eigen::MatrixXcd h;

  Eigen::Index users() const { return h.rows(); }
  Eigen::Index antennas() const { return h.cols(); }
};

enum class ErrorModel { none, model1, model2 };

/// CSIT error settings. `delta_epsilon` bounds the uniform space-angle error;
/// `sigma_zeta` is the standard deviation of the per-link phase error (model2 only).
struct ErrorConfig {
  ErrorModel model = ErrorModel::none;
  double delta_epsilon = 0.0;
  double sigma_zeta = 0.0;
};

inline void validate(const ErrorConfig& e) {
  if (!(e.delta_epsilon >= 0) || !(e.sigma_zeta >= 0))
    throw std::invalid_argument("error bounds must be non-negative");
}

/// Phase ramp across a ULA: entry n (1-based) = exp(-j pi (d_a/lambda) (N+1-2n) c).
/// Used both for the true steering vector (c = cos nu) and the model-1
/// error vector (c = epsilon).
inline Eigen::VectorXcd phase_ramp(double c, int n_ants, double ant_spacing, double wavelength) {
  Eigen::VectorXcd v(n_ants);
  const double base = std::numbers::pi * (ant_spacing / wavelength) * c;
  for (int n = 1; n <= n_ants; ++n) v(n - 1) = std::polar(1.0, -base * (n_ants + 1 - 2 * n));
  return v;
}

inline Eigen::VectorXcd steering_vector(double cos_nu, int n_ants, double ant_spacing, double wavelength) {
  if (!(std::abs(cos_nu) <= 1.0)) throw std::invalid_argument("steering_vector: |cos nu| > 1");
  if (n_ants < 1) throw std::invalid_argument("steering_vector: N < 1");
  return phase_ramp(cos_nu, n_ants, ant_spacing, wavelength);
}

/// Free-space propagation phase 2 pi d / lambda wrapped to [0, 2 pi).
inline double overall_phase(double distance, double wavelength) {
  const double cycles = distance / wavelength;
  const double frac = cycles - std::floor(cycles);
  const double phi = 2.0 * std::numbers::pi * frac;
  return phi < 2.0 * std::numbers::pi ? phi : 0.0;
}

/// Free-space amplitude lambda sqrt(G_usr G_sat) / (4 pi d).
inline double path_amplitude(double distance, const ScenarioConfig& config) {
  return config.wavelength * std::sqrt(config.gain_user * config.gain_sat) / (4.0 * std::numbers::pi * distance);
}

/// LOS channel from one satellite's array to one user.
inline Eigen::VectorXcd channel_vector(double distance, double phase, double cos_nu, const ScenarioConfig& config) {
  if (!(distance > 0)) throw std::invalid_argument("channel_vector: distance must be positive");
  const cd scale = path_amplitude(distance, config) * std::polar(1.0, -phase);
  return scale * steering_vector(cos_nu, config.ants_per_sat, config.inter_ant_distance, config.wavelength);
}

inline ChannelMatrix build_true_channel(const Placement& placement, const ScenarioConfig& config) {
  const Eigen::MatrixXd dist = pair_distances(placement);
  const Eigen::MatrixXd cosines = aod_cosines(placement);
  const int n_ants = config.ants_per_sat;
  ChannelMatrix out{Eigen::MatrixXcd(dist.rows(), dist.cols() * n_ants)};
  for (Eigen::Index k = 0; k < dist.rows(); ++k) {
    for (Eigen::Index m = 0; m < dist.cols(); ++m) {
      const double d = dist(k, m);
      out.h.row(k).segment(m * n_ants, n_ants) =
          channel_vector(d, overall_phase(d, config.wavelength), cosines(k, m), config).transpose();
    }
  }
  return out;
}

/// Imperfect user-position knowledge: each (user, satellite) block is
/// multiplied by a phase ramp for an independent epsilon ~ U(-delta, +delta).
/// Draws one uniform per pair, row-major over (k, m).
inline ChannelMatrix apply_error_model_1(const ChannelMatrix& H, double delta_epsilon, const ScenarioConfig& config,
                                         RandomStream& rng) {
  if (!(delta_epsilon >= 0)) throw std::invalid_argument("delta epsilon must be non-negative");
  const int n_ants = config.ants_per_sat;
  const Eigen::Index sats = H.antennas() / n_ants;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ChannelMatrix out = H;
  for (Eigen::Index k = 0; k < H.users(); ++k) {
    for (Eigen::Index m = 0; m < sats; ++m) {
      const double eps = delta_epsilon * unit(rng);
      const Eigen::VectorXcd ramp = phase_ramp(eps, n_ants, config.inter_ant_distance, config.wavelength);
      auto block = out.h.row(k).segment(m * n_ants, n_ants);
      block = block.cwiseProduct(ramp.transpose());
    }
  }
  return out;
}

/// Model 1 followed by a per-pair synchronization phase exp(-j zeta),
/// zeta ~ N(0, sigma_zeta^2). All epsilons are drawn before any zeta.
inline ChannelMatrix apply_error_model_2(const ChannelMatrix& H, double delta_epsilon, double sigma_zeta,
                                         const ScenarioConfig& config, RandomStream& rng) {
  if (!(sigma_zeta >= 0)) throw std::invalid_argument("sigma zeta must be non-negative");
  ChannelMatrix out = apply_error_model_1(H, delta_epsilon, config, rng);
  const int n_ants = config.ants_per_sat;
  const Eigen::Index sats = H.antennas() / n_ants;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index k = 0; k < H.users(); ++k) {
    for (Eigen::Index m = 0; m < sats; ++m) {
      const double zeta = sigma_zeta * gauss(rng);
      out.h.row(k).segment(m * n_ants, n_ants) *= std::polar(1.0, -zeta);
    }
  }
  return out;
}

/// Erroneous CSIT for the configured error model.
inline ChannelMatrix apply_error(const ChannelMatrix& H, const ErrorConfig& err, const ScenarioConfig& config,
                                 RandomStream& rng) {
  switch (err.model) {
    case ErrorModel::none:
      return H;
    case ErrorModel::model1:
      return apply_error_model_1(H, err.delta_epsilon, config, rng);
    case ErrorModel::model2:
      return apply_error_model_2(H, err.delta_epsilon, err.sigma_zeta, config, rng);
  }
  return H;
}

}  // namespace leo

#endif  // LEO_PRECODING_CHANNEL_HPP
