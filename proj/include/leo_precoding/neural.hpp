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

#ifndef LEO_PRECODING_NEURAL_HPP
#define LEO_PRECODING_NEURAL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leo_precoding/random.hpp"

namespace leo {

/// Raised when a loss or gradient turns non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, linear };

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct DenseLayer {
  Mat<Scalar> weight;  // out x in
  Vec<Scalar> bias;    // out
  Activation activation = Activation::relu;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

/// Feed-forward stack; every layer but the last uses its own activation, the
/// output layer is linear. Gradients use the same type with the same shapes.
template <typename Scalar>
struct DenseNetwork {
  std::vector<DenseLayer<Scalar>> layers;

  Eigen::Index input_dim() const { return layers.front().in_dim(); }
  Eigen::Index output_dim() const { return layers.back().out_dim(); }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }

  /// All-zero network with the given layer widths (input first).
  static DenseNetwork zeros(std::span<const int> widths, Activation hidden = Activation::relu) {
    if (widths.size() < 2) throw std::invalid_argument("network needs at least input and output widths");
    DenseNetwork net;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      if (widths[i] < 1 || widths[i + 1] < 1) throw std::invalid_argument("layer widths must be positive");
      DenseLayer<Scalar> layer;
      layer.weight = Mat<Scalar>::Zero(widths[i + 1], widths[i]);
      layer.bias = Vec<Scalar>::Zero(widths[i + 1]);
      layer.activation = (i + 2 == widths.size()) ? Activation::linear : hidden;
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  DenseNetwork zeros_like() const {
    DenseNetwork g = *this;
    for (auto& l : g.layers) {
      l.weight.setZero();
      l.bias.setZero();
    }
    return g;
  }

  bool all_finite() const {
    return std::all_of(layers.begin(), layers.end(),
                       [](const auto& l) { return l.weight.allFinite() && l.bias.allFinite(); });
  }
};

/// Widths for `hidden_layers` hidden layers of `hidden_units` each.
inline std::vector<int> layer_widths(int input, int hidden_layers, int hidden_units, int output) {
  std::vector<int> w{input};
  for (int i = 0; i < hidden_layers; ++i) w.push_back(hidden_units);
  w.push_back(output);
  return w;
}

/// Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
template <typename Scalar>
void initialize_uniform_fan(DenseNetwork<Scalar>& net, RandomStream& rng) {
  for (auto& l : net.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in_dim() + l.out_dim()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < l.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < l.weight.rows(); ++i) l.weight(i, j) = static_cast<Scalar>(dist(rng));
    l.bias.setZero();
  }
}

template <typename Scalar>
DenseNetwork<Scalar> make_network(std::span<const int> widths, RandomStream& rng) {
  auto net = DenseNetwork<Scalar>::zeros(widths);
  initialize_uniform_fan(net, rng);
  return net;
}

/// Layer inputs and pre-activations retained for the backward pass.
template <typename Scalar>
struct ForwardTrace {
  std::vector<Mat<Scalar>> inputs;       // inputs[l] feeds layer l
  std::vector<Mat<Scalar>> preactivation;
  Mat<Scalar> output;
};

template <typename Scalar>
ForwardTrace<Scalar> forward_trace(const DenseNetwork<Scalar>& net, const Mat<Scalar>& batch) {
  if (batch.rows() != net.input_dim())
    throw std::invalid_argument("forward: input has " + std::to_string(batch.rows()) + " rows, network expects " +
                                std::to_string(net.input_dim()));
  ForwardTrace<Scalar> t;
  t.inputs.reserve(net.layers.size());
  t.preactivation.reserve(net.layers.size());
  Mat<Scalar> x = batch;
  for (const auto& l : net.layers) {
    Mat<Scalar> z(l.out_dim(), x.cols());
    z.noalias() = l.weight * x;
    z.colwise() += l.bias;
    t.inputs.push_back(std::move(x));
    x = (l.activation == Activation::relu) ? Mat<Scalar>(z.cwiseMax(Scalar(0))) : z;
    t.preactivation.push_back(std::move(z));
  }
  t.output = std::move(x);
  return t;
}

/// Batched evaluation; columns are samples.
template <typename Scalar>
Mat<Scalar> forward(const DenseNetwork<Scalar>& net, const Mat<Scalar>& batch) {
  if (batch.rows() != net.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  Mat<Scalar> x = batch;
  for (const auto& l : net.layers) {
    Mat<Scalar> z(l.out_dim(), x.cols());
    z.noalias() = l.weight * x;
    z.colwise() += l.bias;
    if (l.activation == Activation::relu) z = z.cwiseMax(Scalar(0));
    x = std::move(z);
  }
  return x;
}

template <typename Scalar>
Vec<Scalar> forward(const DenseNetwork<Scalar>& net, const Vec<Scalar>& input) {
  return forward(net, Mat<Scalar>(input));
}

template <typename Scalar>
struct Gradients {
  DenseNetwork<Scalar> params;  // empty layers when parameter gradients were not requested
  Mat<Scalar> input;
};

/// Reverse-mode pass for sum(output .* upstream). Parameter gradients are
/// accumulated over the batch; `with_params = false` skips them when only
/// the input gradient is needed.
template <typename Scalar>
Gradients<Scalar> backward(const DenseNetwork<Scalar>& net, const ForwardTrace<Scalar>& trace,
                           const Mat<Scalar>& upstream, bool with_params = true) {
  if (upstream.rows() != net.output_dim() || upstream.cols() != trace.output.cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  Gradients<Scalar> g;
  if (with_params) g.params = net.zeros_like();
  Mat<Scalar> delta = upstream;
  for (std::size_t idx = net.layers.size(); idx-- > 0;) {
    const auto& l = net.layers[idx];
    if (l.activation == Activation::relu)
      delta = delta.cwiseProduct((trace.preactivation[idx].array() > Scalar(0)).template cast<Scalar>().matrix());
    if (with_params) {
      g.params.layers[idx].weight.noalias() = delta * trace.inputs[idx].transpose();
      g.params.layers[idx].bias = delta.rowwise().sum();
    }
    Mat<Scalar> prev(l.in_dim(), delta.cols());
    prev.noalias() = l.weight.transpose() * delta;
    delta = std::move(prev);
  }
  g.input = std::move(delta);
  return g;
}

template <typename Scalar>
Gradients<Scalar> backward(const DenseNetwork<Scalar>& net, const Vec<Scalar>& input, const Vec<Scalar>& upstream) {
  const auto trace = forward_trace(net, Mat<Scalar>(input));
  return backward(net, trace, Mat<Scalar>(upstream));
}

// ---------------------------------------------------------------------------
// Adaptive-moment optimizer

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct OptimizerState {
  DenseNetwork<Scalar> first_moment;
  DenseNetwork<Scalar> second_moment;
  long long step = 0;

  static OptimizerState for_network(const DenseNetwork<Scalar>& net) {
    return OptimizerState{net.zeros_like(), net.zeros_like(), 0};
  }
};

namespace detail {
template <typename Scalar, typename Tensor>
void adam_update(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, Scalar b1, Scalar b2, Scalar c1, Scalar c2,
                 Scalar lr, Scalar eps) {
  m = b1 * m + (Scalar(1) - b1) * grad;
  v = b2 * v + (Scalar(1) - b2) * grad.cwiseAbs2();
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}
}  // namespace detail

/// One bias-corrected adaptive-moment step. Throws DivergenceError on
/// non-finite gradients, leaving parameters and state untouched.
template <typename Scalar>
void optimizer_step(DenseNetwork<Scalar>& net, const DenseNetwork<Scalar>& grads, OptimizerState<Scalar>& state,
                    double lr, const AdamSettings& settings = {}) {
  if (grads.layers.size() != net.layers.size()) throw std::invalid_argument("optimizer_step: gradient shape mismatch");
  if (!grads.all_finite()) throw DivergenceError("optimizer_step: non-finite gradient");
  state.step += 1;
  const auto b1 = static_cast<Scalar>(settings.beta1);
  const auto b2 = static_cast<Scalar>(settings.beta2);
  const auto c1 = static_cast<Scalar>(1.0 - std::pow(settings.beta1, static_cast<double>(state.step)));
  const auto c2 = static_cast<Scalar>(1.0 - std::pow(settings.beta2, static_cast<double>(state.step)));
  const auto eps = static_cast<Scalar>(settings.epsilon);
  const auto rate = static_cast<Scalar>(lr);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    auto& p = net.layers[i];
    const auto& g = grads.layers[i];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() || g.bias.size() != p.bias.size())
      throw std::invalid_argument("optimizer_step: gradient shape mismatch");
    auto& m = state.first_moment.layers[i];
    auto& v = state.second_moment.layers[i];
    detail::adam_update<Scalar>(p.weight, g.weight, m.weight, v.weight, b1, b2, c1, c2, rate, eps);
    detail::adam_update<Scalar>(p.bias, g.bias, m.bias, v.bias, b1, b2, c1, c2, rate, eps);
  }
}

// ---------------------------------------------------------------------------
// Diagonal Gaussian policy head

inline constexpr double kLogScaleMin = -20.0;
inline constexpr double kLogScaleMax = 2.0;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2 pi) / 2

template <typename Scalar>
struct GaussianPolicyOutput {
  Vec<Scalar> mean;
  Vec<Scalar> scale;
};

/// Splits a raw head [means; log-scales] and maps log-scales to clamped scales.
template <typename Scalar>
GaussianPolicyOutput<Scalar> policy_from_head(const Vec<Scalar>& head) {
  if (head.size() % 2 != 0) throw std::invalid_argument("policy head must have even length");
  const Eigen::Index d = head.size() / 2;
  GaussianPolicyOutput<Scalar> out;
  out.mean = head.head(d);
  out.scale = head.tail(d)
                  .array()
                  .max(static_cast<Scalar>(kLogScaleMin))
                  .min(static_cast<Scalar>(kLogScaleMax))
                  .exp()
                  .matrix();
  return out;
}

template <typename Scalar>
struct ActionSample {
  Vec<Scalar> action;
  Vec<Scalar> noise;
};

/// Reparametrized draw: action = mean + scale .* z, z ~ N(0, I).
template <typename Scalar>
ActionSample<Scalar> sample_action(const GaussianPolicyOutput<Scalar>& policy, RandomStream& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ActionSample<Scalar> s;
  s.noise.resize(policy.mean.size());
  for (Eigen::Index i = 0; i < s.noise.size(); ++i) s.noise(i) = static_cast<Scalar>(gauss(rng));
  s.action = policy.mean + policy.scale.cwiseProduct(s.noise);
  return s;
}

/// Per-dimension Gaussian log densities.
template <typename Scalar>
Vec<Scalar> log_prob(const GaussianPolicyOutput<Scalar>& policy, const Vec<Scalar>& action) {
  if (action.size() != policy.mean.size()) throw std::invalid_argument("log_prob: dimension mismatch");
  const auto z = (action - policy.mean).array() / policy.scale.array();
  return (Scalar(-0.5) * z.square() - policy.scale.array().log() - static_cast<Scalar>(kHalfLog2Pi)).matrix();
}

}  // namespace leo

#endif  // LEO_PRECODING_NEURAL_HPP
