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

#ifndef LEO_PRECODING_HARNESS_HPP
#define LEO_PRECODING_HARNESS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "leo_precoding/channel.hpp"
#include "leo_precoding/checkpoint.hpp"
#include "leo_precoding/experiment.hpp"
#include "leo_precoding/geometry.hpp"
#include "leo_precoding/precoding.hpp"
#include "leo_precoding/random.hpp"
#include "leo_precoding/sac.hpp"

namespace leo {

/// Networks are trained and evaluated in single precision.
using TrainScalar = float;

// ---------------------------------------------------------------------------
// Number formatting: shortest round-trip, locale independent.

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

inline constexpr const char* kDiagnosticsHeader =
    "step,reward,critic1_loss,critic2_loss,actor_loss,entropy,temperature,updated";

inline std::string format_diagnostics(const StepDiagnostics& d) {
  std::string s = std::to_string(d.step);
  for (double v : {d.reward, d.critic1_loss, d.critic2_loss, d.actor_loss, d.entropy, d.temperature}) {
    s += ',';
    s += format_number(v);
  }
  s += d.updated ? ",1" : ",0";
  return s;
}

struct TrainingOutcome {
  std::filesystem::path checkpoint;
  std::filesystem::path log;
  std::vector<double> rewards;  // per step
  long long fallback_actions = 0;
};

/// Consecutive non-finite update steps tolerated before training aborts.
inline constexpr int kMaxNonFiniteStreak = 100;

/// Runs the configured number of training steps, appending one diagnostics
/// line per step to `log_path` and writing the final checkpoint (plus
/// intermediate ones every `spec.checkpoint_interval` steps, suffixed with
/// the step number).
inline TrainingOutcome run_training(const ExperimentSpec& spec, const std::filesystem::path& checkpoint_path,
                                    const std::filesystem::path& log_path,
                                    const std::function<void(const StepDiagnostics&)>& progress = {}) {
  validate(spec);
  SacTrainer<TrainScalar> trainer(spec.scenario, spec.sac, spec.training_error, spec.seed);
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw std::runtime_error("cannot open diagnostics log: " + log_path.string());
  log << kDiagnosticsHeader << '\n';

  TrainingOutcome out{checkpoint_path, log_path, {}, 0};
  out.rewards.reserve(static_cast<std::size_t>(spec.sac.steps));
  int streak = 0;
  for (long long t = 0; t < spec.sac.steps; ++t) {
    const StepDiagnostics d = trainer.step();
    out.rewards.push_back(d.reward);
    if (d.fallback_action) ++out.fallback_actions;
    log << format_diagnostics(d) << '\n';
    if (progress) progress(d);
    streak = d.non_finite ? streak + 1 : 0;
    if (streak >= kMaxNonFiniteStreak) {
      log.flush();
      throw DivergenceError("training diverged: non-finite losses for " + std::to_string(streak) +
                            " consecutive steps (last step " + std::to_string(d.step) + ")");
    }
    if (spec.checkpoint_interval > 0 && (t + 1) % spec.checkpoint_interval == 0 && t + 1 < spec.sac.steps) {
      auto p = checkpoint_path;
      p += ".step" + std::to_string(t + 1);
      save_checkpoint(p, trainer.networks());
    }
  }
  log.flush();
  if (!log) throw std::runtime_error("failed writing diagnostics log: " + log_path.string());
  save_checkpoint(checkpoint_path, trainer.networks());
  return out;
}

/// Reward column of a diagnostics log.
inline std::vector<double> read_training_rewards(const std::filesystem::path& log_path) {
  std::ifstream is(log_path);
  if (!is) throw std::runtime_error("cannot open diagnostics log: " + log_path.string());
  std::string line;
  std::getline(is, line);
  if (line != kDiagnosticsHeader) throw std::runtime_error("unexpected diagnostics header in " + log_path.string());
  std::vector<double> rewards;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2) throw std::runtime_error("malformed diagnostics line: " + line);
    rewards.push_back(parse_number(fields[1]));
  }
  return rewards;
}

// ---------------------------------------------------------------------------
// Evaluation sweeps

/// A trained actor evaluated through its mean action.
struct LabeledPolicy {
  std::string label;
  DenseNetwork<TrainScalar> actor;
};

inline LabeledPolicy load_policy(const std::string& label, const std::filesystem::path& checkpoint) {
  return LabeledPolicy{label, load_checkpoint<TrainScalar>(checkpoint).actor};
}

struct SeriesStats {
  std::string label;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct SweepResult {
  std::string axis;
  std::vector<double> grid;
  std::vector<SeriesStats> series;  // MMSE, OMA, then policies in the given order

  const SeriesStats& at(const std::string& label) const {
    for (const auto& s : series)
      if (s.label == label) return s;
    throw std::out_of_range("no series labelled " + label);
  }
};

namespace detail {

/// Running mean / sample standard deviation over values added in a fixed order.
class MomentAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double stddev() const { return n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1)) : 0.0; }

 private:
  long long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline SweepResult make_result(std::string axis, const std::vector<double>& grid,
                               const std::vector<LabeledPolicy>& policies) {
  SweepResult r{std::move(axis), grid, {}};
  std::vector<std::string> labels{"MMSE", "OMA"};
  for (const auto& p : policies) labels.push_back(p.label);
  for (const auto& l : labels) r.series.push_back(SeriesStats{l, std::vector<double>(grid.size(), 0.0),
                                                              std::vector<double>(grid.size(), 0.0)});
  return r;
}

/// Sum rates of every precoder for a set of (true, estimated) channel pairs;
/// result row 0 is MMSE, row 1 OMA, then one row per policy.
inline Eigen::MatrixXd evaluate_precoders(const std::vector<ChannelMatrix>& truth,
                                          const std::vector<ChannelMatrix>& estimate,
                                          const std::vector<LabeledPolicy>& policies, const ScenarioConfig& c) {
  const auto n = static_cast<Eigen::Index>(truth.size());
  Eigen::MatrixXd rates(2 + static_cast<Eigen::Index>(policies.size()), n);
  Eigen::MatrixXd states(c.state_dim(), n);
  const double scale = state_amplitude_scale(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& H = truth[static_cast<std::size_t>(i)];
    const auto& Hest = estimate[static_cast<std::size_t>(i)];
    rates(0, i) = sum_rate(H, mmse_precoder(Hest, c.total_power, c.noise_power, c.num_sats), c.noise_power);
    rates(1, i) = oma_sum_rate(H, Hest, c.total_power, c.noise_power);
    states.col(i) = preprocess_csit(Hest, scale);
  }
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const auto precoders = deterministic_precoders(policies[p].actor, states, c);
    for (Eigen::Index i = 0; i < n; ++i)
      rates(2 + static_cast<Eigen::Index>(p), i) =
          sum_rate(truth[static_cast<std::size_t>(i)], precoders[static_cast<std::size_t>(i)], c.noise_power);
  }
  return rates;
}

inline constexpr int kMonteCarloChunk = 1000;

/// Monte Carlo sweep shared by both error models. Iteration i of every grid
/// point uses the same pre-assigned streams (jitter and error draws), so
/// grid points are compared on common random numbers and the result does
/// not depend on evaluation order.
template <typename MakeError>
SweepResult monte_carlo_sweep(std::string axis, const std::vector<double>& grid,
                              const std::vector<LabeledPolicy>& policies, const ExperimentSpec& spec,
                              MakeError make_error) {
  const auto& c = spec.scenario;
  SweepResult r = make_result(std::move(axis), grid, policies);
  const int iterations = spec.sweep.monte_carlo_iterations;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const ErrorConfig err = make_error(grid[g]);
    std::vector<MomentAccumulator> acc(r.series.size());
    for (int start = 0; start < iterations; start += kMonteCarloChunk) {
      const int stop = std::min(iterations, start + kMonteCarloChunk);
      std::vector<ChannelMatrix> truth;
      std::vector<ChannelMatrix> estimate;
      for (int i = start; i < stop; ++i) {
        const auto iter = static_cast<std::uint64_t>(i);
        auto placement_rng = make_stream(spec.seed, {static_cast<std::uint64_t>(StreamTag::monte_carlo), 1, iter});
        auto error_rng = make_stream(spec.seed, {static_cast<std::uint64_t>(StreamTag::monte_carlo), 2, iter});
        const Placement p = place_constellation(c, c.user_jitter_bound, placement_rng);
        truth.push_back(build_true_channel(p, c));
        estimate.push_back(apply_error(truth.back(), err, c, error_rng));
      }
      const Eigen::MatrixXd rates = evaluate_precoders(truth, estimate, policies, c);
      for (Eigen::Index i = 0; i < rates.cols(); ++i)
        for (std::size_t s = 0; s < acc.size(); ++s) acc[s].add(rates(static_cast<Eigen::Index>(s), i));
    }
    for (std::size_t s = 0; s < acc.size(); ++s) {
      r.series[s].mean[g] = acc[s].mean();
      r.series[s].stddev[g] = acc[s].stddev();
    }
  }
  return r;
}

}  // namespace detail

/// Perfect-CSIT rates on the zero-jitter layout for every mean user distance
/// in the grid; one deterministic evaluation per point.
inline SweepResult sweep_user_distance(const std::vector<LabeledPolicy>& policies, const std::vector<double>& grid,
                                       const ExperimentSpec& spec) {
  validate_grid(grid, "distance grid");
  SweepResult r = detail::make_result("user_distance_m", grid, policies);
  std::vector<ChannelMatrix> channels;
  channels.reserve(grid.size());
  RandomStream unused(0);
  for (double distance : grid) {
    ScenarioConfig c = spec.scenario;
    c.mean_user_distance = distance;
    channels.push_back(build_true_channel(place_constellation(c, 0.0, unused), c));
  }
  const Eigen::MatrixXd rates = detail::evaluate_precoders(channels, channels, policies, spec.scenario);
  for (std::size_t s = 0; s < r.series.size(); ++s)
    for (std::size_t g = 0; g < grid.size(); ++g)
      r.series[s].mean[g] = rates(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(g));
  return r;
}

/// Mean and standard deviation over Monte Carlo draws of user jitter and
/// model-1 errors, one grid point per error bound.
inline SweepResult sweep_error_model_1(const std::vector<LabeledPolicy>& policies, const std::vector<double>& grid,
                                       const ExperimentSpec& spec) {
  validate_grid(grid, "error1 grid");
  return detail::monte_carlo_sweep("delta_epsilon", grid, policies, spec, [](double delta) {
    return ErrorConfig{ErrorModel::model1, delta, 0.0};
  });
}

/// As sweep_error_model_1 with the space-angle bound fixed and the
/// synchronization phase scale swept.
inline SweepResult sweep_error_model_2(const std::vector<LabeledPolicy>& policies, const std::vector<double>& grid,
                                       const ExperimentSpec& spec) {
  validate_grid(grid, "error2 grid");
  const double delta = spec.sweep.error2_delta_epsilon;
  return detail::monte_carlo_sweep("sigma_zeta", grid, policies, spec, [delta](double sigma) {
    return ErrorConfig{ErrorModel::model2, delta, sigma};
  });
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv(std::ostream& os, const SweepResult& r) {
  os << r.axis;
  for (const auto& s : r.series) os << ',' << s.label << "_mean," << s.label << "_std";
  os << '\n';
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    os << format_number(r.grid[g]);
    for (const auto& s : r.series) os << ',' << format_number(s.mean[g]) << ',' << format_number(s.stddev[g]);
    os << '\n';
  }
}

inline void emit_csv(const SweepResult& r, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write CSV: " + path.string());
  write_csv(os, r);
  os.flush();
  if (!os) throw std::runtime_error("failed writing CSV: " + path.string());
}

inline SweepResult parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("CSV: missing header");
  const auto header = split(line, ',');
  if (header.size() < 1 || (header.size() - 1) % 2 != 0) throw std::invalid_argument("CSV: malformed header");
  SweepResult r;
  r.axis = std::string(header[0]);
  for (std::size_t i = 1; i < header.size(); i += 2) {
    const std::string mean_col(header[i]);
    const std::string suffix = "_mean";
    if (mean_col.size() <= suffix.size() || mean_col.compare(mean_col.size() - suffix.size(), suffix.size(), suffix))
      throw std::invalid_argument("CSV: expected a *_mean column, got " + mean_col);
    r.series.push_back(SeriesStats{mean_col.substr(0, mean_col.size() - suffix.size()), {}, {}});
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) throw std::invalid_argument("CSV: row has wrong column count");
    r.grid.push_back(parse_number(fields[0]));
    for (std::size_t s = 0; s < r.series.size(); ++s) {
      r.series[s].mean.push_back(parse_number(fields[1 + 2 * s]));
      r.series[s].stddev.push_back(parse_number(fields[2 + 2 * s]));
    }
  }
  return r;
}

inline SweepResult read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open CSV: " + path.string());
  return parse_csv(is);
}

}  // namespace leo

#endif  // LEO_PRECODING_HARNESS_HPP
