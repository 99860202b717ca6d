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

#ifndef LEO_PRECODING_SAC_HPP
#define LEO_PRECODING_SAC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "leo_precoding/channel.hpp"
#include "leo_precoding/geometry.hpp"
#include "leo_precoding/neural.hpp"
#include "leo_precoding/precoding.hpp"
#include "leo_precoding/random.hpp"

namespace leo {

struct SacConfig {
  int batch_size = 512;
  double critic_lr = 1e-5;
  double actor_lr = 1e-6;
  long long steps = 30000;
  int buffer_capacity = 10000;
  int hidden_layers = 4;
  int hidden_units = 512;
  /// Per-dimension entropy the temperature tries to hold.
  double entropy_target = 1.0;
  double temperature_lr = 1e-3;
  /// Log-domain temperature; the entropy term is weighted by exp(alpha).
  double initial_log_temperature = 0.0;
};

inline void validate(const SacConfig& c) {
  if (c.batch_size < 1 || c.buffer_capacity < 1 || c.steps < 0 || c.hidden_layers < 0 || c.hidden_units < 1)
    throw std::invalid_argument("invalid SAC configuration: sizes must be positive");
  if (!(c.critic_lr > 0) || !(c.actor_lr > 0) || !(c.temperature_lr > 0))
    throw std::invalid_argument("invalid SAC configuration: learning rates must be positive");
  if (!std::isfinite(c.entropy_target) || !std::isfinite(c.initial_log_temperature))
    throw std::invalid_argument("invalid SAC configuration: non-finite entropy settings");
}

// ---------------------------------------------------------------------------
// State / action layout. Index of (user k, satellite m, antenna n) is
// k*M*N + m*N + n, i.e. row-major over the K x MN channel.

/// Multiplier that brings channel magnitudes to order one: the reciprocal of
/// the free-space amplitude at the satellite altitude.
inline double state_amplitude_scale(const ScenarioConfig& config) {
  return 1.0 / path_amplitude(config.sat_altitude, config);
}

/// [scaled magnitudes | phases in (-pi, pi]] of the channel estimate.
inline Eigen::VectorXd preprocess_csit(const ChannelMatrix& H_est, double amplitude_scale) {
  const Eigen::Index users = H_est.users();
  const Eigen::Index ants = H_est.antennas();
  const Eigen::Index half = users * ants;
  Eigen::VectorXd state(2 * half);
  for (Eigen::Index k = 0; k < users; ++k) {
    for (Eigen::Index j = 0; j < ants; ++j) {
      const cd v = H_est.h(k, j);
      const Eigen::Index idx = k * ants + j;
      state(idx) = std::abs(v) * amplitude_scale;
      double phase = std::arg(v);
      if (phase <= -std::numbers::pi) phase = std::numbers::pi;
      state(half + idx) = phase;
    }
  }
  return state;
}

/// True when the action carries no direction and cannot be normalized.
inline bool is_degenerate_action(const Eigen::VectorXd& action) {
  return !(action.squaredNorm() > 0) || !action.allFinite();
}

/// Reshapes [real parts | imaginary parts] into an (M*N) x K precoder
/// without any power normalization.
inline PrecodingMatrix unflatten_precoder(const Eigen::VectorXd& action, int num_sats, int ants_per_sat,
                                          int num_users) {
  const Eigen::Index ants = static_cast<Eigen::Index>(num_sats) * ants_per_sat;
  const Eigen::Index half = ants * num_users;
  if (action.size() != 2 * half) throw std::invalid_argument("action length must be 2*M*N*K");
  PrecodingMatrix W{Eigen::MatrixXcd(ants, num_users)};
  for (Eigen::Index k = 0; k < num_users; ++k)
    for (Eigen::Index j = 0; j < ants; ++j) W.w(j, k) = cd(action(k * ants + j), action(half + k * ants + j));
  return W;
}

/// Inverse of unflatten_precoder.
inline Eigen::VectorXd flatten_precoder(const PrecodingMatrix& W) {
  const Eigen::Index ants = W.w.rows();
  const Eigen::Index users = W.w.cols();
  const Eigen::Index half = ants * users;
  Eigen::VectorXd a(2 * half);
  for (Eigen::Index k = 0; k < users; ++k) {
    for (Eigen::Index j = 0; j < ants; ++j) {
      a(k * ants + j) = W.w(j, k).real();
      a(half + k * ants + j) = W.w(j, k).imag();
    }
  }
  return a;
}

/// Reshape then normalize to P/M on the most loaded satellite. A degenerate
/// action falls back to the uniform equal-power precoder; callers that need
/// to report the event check is_degenerate_action first.
inline PrecodingMatrix action_to_precoder(const Eigen::VectorXd& action, double total_power, int num_sats,
                                          int ants_per_sat, int num_users) {
  PrecodingMatrix W = unflatten_precoder(action, num_sats, ants_per_sat, num_users);
  if (is_degenerate_action(action)) W.w.setConstant(cd(1.0, 0.0));
  return enforce_per_satellite_power(W, total_power, num_sats);
}

inline PrecodingMatrix action_to_precoder(const Eigen::VectorXd& action, const ScenarioConfig& c) {
  return action_to_precoder(action, c.total_power, c.num_sats, c.ants_per_sat, c.num_users);
}

// ---------------------------------------------------------------------------
// Experience buffer

struct ExperienceSample {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
};

/// Fixed-capacity ring; once full, the oldest sample is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
    ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void push(ExperienceSample sample) {
    if (!sample.state.allFinite() || !sample.action.allFinite() || !std::isfinite(sample.reward))
      throw std::invalid_argument("replay buffer: non-finite sample");
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(sample));
    } else {
      ring_[head_] = std::move(sample);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return ring_.empty(); }

  /// i-th stored sample, oldest first.
  const ExperienceSample& at(std::size_t i) const {
    if (i >= ring_.size()) throw std::out_of_range("replay buffer index");
    return ring_[(head_ + i) % ring_.size()];
  }

  /// `count` positions (oldest-first indexing) drawn i.i.d. uniform with replacement.
  std::vector<std::size_t> sample_indices(std::size_t count, RandomStream& rng) const {
    if (ring_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
    std::vector<std::size_t> idx(count);
    for (auto& i : idx) i = pick(rng);
    return idx;
  }

  std::vector<ExperienceSample> sample(std::size_t count, RandomStream& rng) const {
    std::vector<ExperienceSample> out;
    out.reserve(count);
    for (auto i : sample_indices(count, rng)) out.push_back(at(i));
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<ExperienceSample> ring_;
};

template <typename Scalar>
struct Batch {
  Mat<Scalar> states;   // state_dim x B
  Mat<Scalar> actions;  // action_dim x B
  Mat<Scalar> rewards;  // 1 x B
};

template <typename Scalar>
Batch<Scalar> gather_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("empty batch");
  const auto& first = buffer.at(indices.front());
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch<Scalar> b{Mat<Scalar>(first.state.size(), n), Mat<Scalar>(first.action.size(), n), Mat<Scalar>(1, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& s = buffer.at(indices[static_cast<std::size_t>(c)]);
    b.states.col(c) = s.state.cast<Scalar>();
    b.actions.col(c) = s.action.cast<Scalar>();
    b.rewards(0, c) = static_cast<Scalar>(s.reward);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Learning updates

template <typename Scalar>
Mat<Scalar> stack_rows(const Mat<Scalar>& top, const Mat<Scalar>& bottom) {
  Mat<Scalar> x(top.rows() + bottom.rows(), top.cols());
  x << top, bottom;
  return x;
}

/// Mean squared error of a critic against observed rewards, with its gradient.
template <typename Scalar>
struct CriticLoss {
  double loss = 0.0;
  DenseNetwork<Scalar> gradient;
};

template <typename Scalar>
CriticLoss<Scalar> critic_loss(const DenseNetwork<Scalar>& critic, const Mat<Scalar>& states,
                               const Mat<Scalar>& actions, const Mat<Scalar>& rewards) {
  if (states.cols() == 0) throw std::invalid_argument("critic update needs a non-empty batch");
  const auto trace = forward_trace(critic, stack_rows(states, actions));
  const Mat<Scalar> residual = trace.output - rewards;
  const auto n = static_cast<Scalar>(states.cols());
  CriticLoss<Scalar> out;
  out.loss = static_cast<double>(residual.squaredNorm() / n);
  if (std::isfinite(out.loss)) out.gradient = backward(critic, trace, Mat<Scalar>((Scalar(2) / n) * residual)).params;
  return out;
}

/// One regression step on (Q(s,a) - R)^2. Returns the loss before the step;
/// a non-finite loss is returned without touching the parameters.
template <typename Scalar>
double critic_update(DenseNetwork<Scalar>& critic, OptimizerState<Scalar>& opt, const Batch<Scalar>& batch,
                     double lr) {
  auto l = critic_loss(critic, batch.states, batch.actions, batch.rewards);
  if (!std::isfinite(l.loss)) return l.loss;
  optimizer_step(critic, l.gradient, opt, lr);
  return l.loss;
}

template <typename Scalar>
struct ActorLoss {
  double loss = 0.0;            // q_term + entropy_term
  double q_term = 0.0;          // mean of -min(Q1, Q2)
  double entropy_term = 0.0;    // exp(alpha) * mean per-dimension log density
  double mean_log_prob = 0.0;   // mean per-dimension log density of the batch actions
  DenseNetwork<Scalar> gradient;  // filled only when requested
};

/// Composite actor loss on a batch of states with frozen standard-normal
/// noise (action_dim x B). Gradients reach the actor through the
/// reparametrized actions in both terms; the critics are not differentiated
/// with respect to their own parameters.
template <typename Scalar>
ActorLoss<Scalar> actor_loss(const DenseNetwork<Scalar>& actor, const DenseNetwork<Scalar>& critic1,
                             const DenseNetwork<Scalar>& critic2, double log_alpha, const Mat<Scalar>& states,
                             const Mat<Scalar>& noise, bool with_gradient = true) {
  const Eigen::Index batch = states.cols();
  if (batch == 0) throw std::invalid_argument("actor loss needs a non-empty batch");
  const auto actor_trace = forward_trace(actor, states);
  const Eigen::Index dim = actor.output_dim() / 2;
  if (noise.rows() != dim || noise.cols() != batch) throw std::invalid_argument("actor loss: noise shape mismatch");

  const Mat<Scalar> mean = actor_trace.output.topRows(dim);
  const Mat<Scalar> raw_log_scale = actor_trace.output.bottomRows(dim);
  const Mat<Scalar> log_scale = raw_log_scale.array()
                                    .max(static_cast<Scalar>(kLogScaleMin))
                                    .min(static_cast<Scalar>(kLogScaleMax))
                                    .matrix();
  const Mat<Scalar> scale = log_scale.array().exp().matrix();
  const Mat<Scalar> actions = mean + scale.cwiseProduct(noise);

  const Mat<Scalar> critic_in = stack_rows(states, actions);
  const auto t1 = forward_trace(critic1, critic_in);
  const auto t2 = forward_trace(critic2, critic_in);

  // (a - mu) / sigma is exactly the noise, so log density is -z^2/2 - log sigma - log(2 pi)/2.
  const Mat<Scalar> log_density =
      (Scalar(-0.5) * noise.array().square() - log_scale.array() - static_cast<Scalar>(kHalfLog2Pi)).matrix();

  const double temperature = std::exp(log_alpha);
  ActorLoss<Scalar> out;
  double min_sum = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) min_sum += static_cast<double>(std::min(t1.output(0, b), t2.output(0, b)));
  out.q_term = -min_sum / static_cast<double>(batch);
  out.mean_log_prob = static_cast<double>(log_density.mean());
  out.entropy_term = temperature * out.mean_log_prob;
  out.loss = out.q_term + out.entropy_term;
  if (!with_gradient || !std::isfinite(out.loss)) return out;

  // d(-min Q)/dQ_selected = -1/B; ties go to the first critic.
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  Mat<Scalar> up1 = Mat<Scalar>::Zero(1, batch);
  Mat<Scalar> up2 = Mat<Scalar>::Zero(1, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    if (t1.output(0, b) <= t2.output(0, b))
      up1(0, b) = -inv_b;
    else
      up2(0, b) = -inv_b;
  }
  const Mat<Scalar> d_action = backward(critic1, t1, up1, false).input.bottomRows(dim) +
                               backward(critic2, t2, up2, false).input.bottomRows(dim);

  const Scalar entropy_grad = static_cast<Scalar>(-temperature) / static_cast<Scalar>(dim * batch);
  const Mat<Scalar> clamp_mask = ((raw_log_scale.array() > static_cast<Scalar>(kLogScaleMin)) &&
                                  (raw_log_scale.array() < static_cast<Scalar>(kLogScaleMax)))
                                     .template cast<Scalar>()
                                     .matrix();
  Mat<Scalar> d_head(2 * dim, batch);
  d_head.topRows(dim) = d_action;
  d_head.bottomRows(dim) =
      ((d_action.cwiseProduct(scale).cwiseProduct(noise)).array() + entropy_grad).matrix().cwiseProduct(clamp_mask);
  out.gradient = backward(actor, actor_trace, d_head).params;
  return out;
}

struct TemperatureState {
  double log_alpha = 0.0;
  double entropy_estimate = 0.0;
};

/// Moves the log temperature toward holding the per-dimension entropy at
/// `target_entropy`: entropy below target raises alpha.
inline TemperatureState temperature_update(const TemperatureState& temp, double mean_log_prob, double target_entropy,
                                           double temperature_lr) {
  TemperatureState next = temp;
  next.entropy_estimate = -mean_log_prob;
  next.log_alpha = temp.log_alpha + temperature_lr * (target_entropy - next.entropy_estimate);
  return next;
}

// ---------------------------------------------------------------------------
// Trainer

template <typename Scalar>
struct SacNetworks {
  DenseNetwork<Scalar> actor;
  DenseNetwork<Scalar> critic1;
  DenseNetwork<Scalar> critic2;
  OptimizerState<Scalar> actor_opt;
  OptimizerState<Scalar> critic1_opt;
  OptimizerState<Scalar> critic2_opt;
  TemperatureState temperature;
  long long step = 0;
};

/// Actor: state -> [means | log-scales]; critics: [state | action] -> scalar.
/// The three networks come from one stream in the order actor, critic1,
/// critic2, so the critics are independent draws.
template <typename Scalar>
SacNetworks<Scalar> init_networks(const ScenarioConfig& scenario, const SacConfig& sac, RandomStream& rng) {
  const int dim = scenario.state_dim();
  SacNetworks<Scalar> n;
  const auto actor_w = layer_widths(dim, sac.hidden_layers, sac.hidden_units, 2 * dim);
  const auto critic_w = layer_widths(2 * dim, sac.hidden_layers, sac.hidden_units, 1);
  n.actor = make_network<Scalar>(actor_w, rng);
  n.critic1 = make_network<Scalar>(critic_w, rng);
  n.critic2 = make_network<Scalar>(critic_w, rng);
  n.actor_opt = OptimizerState<Scalar>::for_network(n.actor);
  n.critic1_opt = OptimizerState<Scalar>::for_network(n.critic1);
  n.critic2_opt = OptimizerState<Scalar>::for_network(n.critic2);
  n.temperature.log_alpha = sac.initial_log_temperature;
  return n;
}

struct StepDiagnostics {
  long long step = 0;
  double reward = 0.0;
  double critic1_loss = std::numeric_limits<double>::quiet_NaN();
  double critic2_loss = std::numeric_limits<double>::quiet_NaN();
  double actor_loss = std::numeric_limits<double>::quiet_NaN();
  double entropy = 0.0;      // per-dimension estimate
  double temperature = 1.0;  // exp(alpha) after the step
  bool updated = false;
  bool non_finite = false;
  bool fallback_action = false;
  // Retained only in diagnostics mode.
  std::optional<ChannelMatrix> true_channel;
  std::optional<PrecodingMatrix> precoder;
};

/// Mean-action precoders for a batch of states (columns).
template <typename Scalar>
std::vector<PrecodingMatrix> deterministic_precoders(const DenseNetwork<Scalar>& actor, const Eigen::MatrixXd& states,
                                                     const ScenarioConfig& c) {
  const Mat<Scalar> head = forward(actor, Mat<Scalar>(states.cast<Scalar>()));
  const Eigen::Index dim = head.rows() / 2;
  std::vector<PrecodingMatrix> out;
  out.reserve(static_cast<std::size_t>(states.cols()));
  for (Eigen::Index b = 0; b < states.cols(); ++b) {
    const Eigen::VectorXd mean = head.col(b).head(dim).template cast<double>();
    out.push_back(action_to_precoder(mean, c));
  }
  return out;
}

/// Single-step soft actor-critic on the downlink environment. Owns the
/// networks, the experience buffer and one random stream per purpose.
template <typename Scalar>
class SacTrainer {
 public:
  SacTrainer(ScenarioConfig scenario, SacConfig sac, ErrorConfig error, std::uint64_t seed)
      : scenario_(scenario),
        sac_(sac),
        error_(error),
        buffer_(static_cast<std::size_t>(sac.buffer_capacity)),
        placement_rng_(make_stream(seed, StreamTag::placement)),
        error_rng_(make_stream(seed, StreamTag::channel_error)),
        action_rng_(make_stream(seed, StreamTag::action_sampling)),
        buffer_rng_(make_stream(seed, StreamTag::buffer_sampling)) {
    validate(scenario_);
    validate(sac_);
    validate(error_);
    auto init_rng = make_stream(seed, StreamTag::network_init);
    nets_ = init_networks<Scalar>(scenario_, sac_, init_rng);
    amplitude_scale_ = state_amplitude_scale(scenario_);
  }

  StepDiagnostics step(bool keep_pair = false) {
    StepDiagnostics d;
    d.step = nets_.step;

    const Placement placement = place_constellation(scenario_, scenario_.user_jitter_bound, placement_rng_);
    const ChannelMatrix H = build_true_channel(placement, scenario_);
    const ChannelMatrix H_est = apply_error(H, error_, scenario_, error_rng_);
    const Eigen::VectorXd state = preprocess_csit(H_est, amplitude_scale_);

    const Vec<Scalar> head = forward(nets_.actor, Vec<Scalar>(state.cast<Scalar>()));
    const auto policy = policy_from_head<Scalar>(head);
    const auto draw = sample_action(policy, action_rng_);
    const Eigen::VectorXd action = draw.action.template cast<double>();
    d.fallback_action = is_degenerate_action(action);
    const PrecodingMatrix W = action_to_precoder(action, scenario_);
    d.reward = sum_rate(H, W, scenario_.noise_power);
    d.entropy = -static_cast<double>(log_prob(policy, draw.action).mean());
    if (keep_pair) {
      d.true_channel = H;
      d.precoder = W;
    }
    buffer_.push(ExperienceSample{state, action, d.reward});

    if (buffer_.size() >= static_cast<std::size_t>(sac_.batch_size)) {
      d.updated = true;
      const auto n_batch = static_cast<std::size_t>(sac_.batch_size);
      const auto batch = gather_batch<Scalar>(buffer_, buffer_.sample_indices(n_batch, buffer_rng_));
      d.critic1_loss = critic_update(nets_.critic1, nets_.critic1_opt, batch, sac_.critic_lr);
      d.critic2_loss = critic_update(nets_.critic2, nets_.critic2_opt, batch, sac_.critic_lr);

      const auto actor_batch = gather_batch<Scalar>(buffer_, buffer_.sample_indices(n_batch, buffer_rng_));
      Mat<Scalar> noise(nets_.actor.output_dim() / 2, actor_batch.states.cols());
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (Eigen::Index j = 0; j < noise.cols(); ++j)
        for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = static_cast<Scalar>(gauss(action_rng_));
      auto al = actor_loss(nets_.actor, nets_.critic1, nets_.critic2, nets_.temperature.log_alpha,
                           actor_batch.states, noise, true);
      d.actor_loss = al.loss;
      if (std::isfinite(al.loss)) {
        optimizer_step(nets_.actor, al.gradient, nets_.actor_opt, sac_.actor_lr);
        nets_.temperature =
            temperature_update(nets_.temperature, al.mean_log_prob, sac_.entropy_target, sac_.temperature_lr);
        d.entropy = nets_.temperature.entropy_estimate;
      }
      d.non_finite = !std::isfinite(d.critic1_loss) || !std::isfinite(d.critic2_loss) || !std::isfinite(d.actor_loss);
    }
    d.temperature = std::exp(nets_.temperature.log_alpha);
    ++nets_.step;
    return d;
  }

  const SacNetworks<Scalar>& networks() const { return nets_; }
  SacNetworks<Scalar>& networks() { return nets_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const ScenarioConfig& scenario() const { return scenario_; }
  const SacConfig& sac_config() const { return sac_; }

 private:
  ScenarioConfig scenario_;
  SacConfig sac_;
  ErrorConfig error_;
  ReplayBuffer buffer_;
  RandomStream placement_rng_;
  RandomStream error_rng_;
  RandomStream action_rng_;
  RandomStream buffer_rng_;
  SacNetworks<Scalar> nets_;
  double amplitude_scale_ = 1.0;
};

}  // namespace leo

#endif  // LEO_PRECODING_SAC_HPP
