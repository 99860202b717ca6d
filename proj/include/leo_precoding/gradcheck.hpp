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

#ifndef LEO_PRECODING_GRADCHECK_HPP
#define LEO_PRECODING_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "leo_precoding/neural.hpp"
#include "leo_precoding/random.hpp"
#include "leo_precoding/sac.hpp"

namespace leo {

struct GradCheckResult {
  long long parameters_checked = 0;
  double max_relative_error = 0.0;
};

/// |analytic - numeric| / max(|analytic|, |numeric|, floor). The floor keeps
/// roundoff on vanishing gradients from counting as relative error.
inline double gradient_relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares `analytic` against central differences of `loss` for every
/// parameter of `net` (perturbed in place and restored).
inline GradCheckResult compare_with_central_differences(DenseNetwork<double>& net,
                                                        const DenseNetwork<double>& analytic,
                                                        const std::function<double()>& loss, double step) {
  GradCheckResult r;
  auto probe = [&](double& param, double grad) {
    const double saved = param;
    param = saved + step;
    const double up = loss();
    param = saved - step;
    const double down = loss();
    param = saved;
    r.max_relative_error = std::max(r.max_relative_error, gradient_relative_error(grad, (up - down) / (2 * step)));
    ++r.parameters_checked;
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) probe(layer.weight(i, j), analytic.layers[l].weight(i, j));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) probe(layer.bias(i), analytic.layers[l].bias(i));
  }
  return r;
}

/// Random dense network with random width/depth (up to `max_layers` hidden
/// layers of up to `max_units`), random input batch and upstream gradient;
/// checks sum(output .* upstream) against central differences.
inline GradCheckResult check_random_network(RandomStream& rng, int max_layers = 3, int max_units = 16,
                                            double step = 1e-5) {
  std::uniform_int_distribution<int> depth(1, max_layers);
  std::uniform_int_distribution<int> width(1, max_units);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<int> widths{width(rng)};
  const int hidden = depth(rng);
  for (int i = 0; i < hidden; ++i) widths.push_back(width(rng));
  widths.push_back(width(rng));
  auto net = make_network<double>(widths, rng);
  for (auto& l : net.layers)
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * gauss(rng);
  const int batch = 3;
  Mat<double> x(widths.front(), batch);
  Mat<double> up(widths.back(), batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
  for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = gauss(rng);
  const auto grads = backward(net, forward_trace(net, x), up).params;
  return compare_with_central_differences(
      net, grads, [&] { return forward(net, x).cwiseProduct(up).sum(); }, step);
}

/// Actor-loss gradient on a tiny instance with `action_dim`-dimensional
/// actions and frozen reparametrization noise.
inline GradCheckResult check_actor_loss(RandomStream& rng, int action_dim = 2, double step = 1e-5) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int state_dim = 3;
  const int batch = 4;
  auto actor = make_network<double>(layer_widths(state_dim, 2, 8, 2 * action_dim), rng);
  auto critic1 = make_network<double>(layer_widths(state_dim + action_dim, 2, 8, 1), rng);
  auto critic2 = make_network<double>(layer_widths(state_dim + action_dim, 2, 8, 1), rng);
  Mat<double> states(state_dim, batch);
  Mat<double> noise(action_dim, batch);
  for (Eigen::Index i = 0; i < states.size(); ++i) states(i) = gauss(rng);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = gauss(rng);
  const double log_alpha = -0.5;
  const auto analytic = actor_loss(actor, critic1, critic2, log_alpha, states, noise, true).gradient;
  return compare_with_central_differences(
      actor, analytic,
      [&] { return actor_loss(actor, critic1, critic2, log_alpha, states, noise, false).loss; }, step);
}

}  // namespace leo

#endif  // LEO_PRECODING_GRADCHECK_HPP
