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

// Command-line front end: training, evaluation sweeps and gradient checks.

#include <cstdint>
#include <exception>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "leo_precoding/experiment.hpp"
#include "leo_precoding/gradcheck.hpp"
#include "leo_precoding/harness.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> checkpoints;
};

leo::ExperimentSpec load_spec(const CommonOptions& o) {
  leo::ExperimentSpec spec = o.config.empty() ? leo::ExperimentSpec{} : leo::load_experiment(o.config);
  if (o.seed) spec.seed = *o.seed;
  leo::validate(spec);
  return spec;
}

// Accepts LABEL=PATH or a bare PATH (labelled with the default).
std::vector<leo::LabeledPolicy> load_policies(const std::vector<std::string>& args, const std::string& default_label) {
  std::vector<leo::LabeledPolicy> out;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    const std::string label = eq == std::string::npos ? default_label : a.substr(0, eq);
    const std::string path = eq == std::string::npos ? a : a.substr(eq + 1);
    if (label.empty() || label.find(',') != std::string::npos)
      throw std::invalid_argument("invalid policy label in '" + a + "'");
    out.push_back(leo::load_policy(label, path));
  }
  return out;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_checkpoint) {
  cmd->add_option("--config", o.config, "JSON experiment configuration (defaults to the reference scenario)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed, overrides the configuration");
  cmd->add_option("--out", o.out, "Output path")->required();
  if (with_checkpoint)
    cmd->add_option("--checkpoint", o.checkpoints, "Trained policy as LABEL=PATH (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative LEO downlink precoding: SAC training and baseline sweeps"};
  app.require_subcommand(1);

  CommonOptions train_opt;
  std::string log_path;
  auto* train = app.add_subcommand("train", "Train a SAC precoder and write its checkpoint");
  add_common(train, train_opt, false);
  train->add_option("--log", log_path, "Per-step diagnostics log (default: <out>.log.csv)");

  CommonOptions dist_opt, err1_opt, err2_opt;
  auto* dist = app.add_subcommand("sweep-distance", "Perfect-CSIT sum rate over mean user distance");
  add_common(dist, dist_opt, true);
  auto* err1 = app.add_subcommand("sweep-error1", "Monte Carlo sum rate over the space-angle error bound");
  add_common(err1, err1_opt, true);
  auto* err2 = app.add_subcommand("sweep-error2", "Monte Carlo sum rate over the synchronization phase scale");
  add_common(err2, err2_opt, true);

  CommonOptions grad_opt;
  int networks = 20;
  auto* grad = app.add_subcommand("gradcheck", "Compare analytic gradients with central finite differences");
  grad->add_option("--seed", grad_opt.seed, "Seed for the random networks");
  grad->add_option("--networks", networks, "Number of random networks")->check(CLI::PositiveNumber);
  grad->add_option("--out", grad_opt.out, "Optional report file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const auto spec = load_spec(train_opt);
      const std::filesystem::path ckpt = train_opt.out;
      const std::filesystem::path log = log_path.empty() ? train_opt.out + ".log.csv" : log_path;
      const long long total = spec.sac.steps;
      const auto outcome = leo::run_training(spec, ckpt, log, [total](const leo::StepDiagnostics& d) {
        if ((d.step + 1) % 1000 == 0 || d.step + 1 == total)
          std::cerr << "step " << d.step + 1 << "/" << total << "  reward " << d.reward << "  entropy " << d.entropy
                    << "  exp(alpha) " << d.temperature << '\n';
      });
      std::cout << "checkpoint: " << outcome.checkpoint.string() << "\nlog: " << outcome.log.string() << '\n';
      if (outcome.fallback_actions > 0)
        std::cerr << "warning: " << outcome.fallback_actions << " degenerate actions replaced by the uniform precoder\n";
    } else if (*dist || *err1 || *err2) {
      const auto& opt = *dist ? dist_opt : (*err1 ? err1_opt : err2_opt);
      const auto spec = load_spec(opt);
      leo::SweepResult result;
      if (*dist) {
        result = leo::sweep_user_distance(load_policies(opt.checkpoints, "SAC1"), spec.sweep.distance_grid, spec);
      } else if (*err1) {
        result = leo::sweep_error_model_1(load_policies(opt.checkpoints, "SAC2"), spec.sweep.error1_grid, spec);
      } else {
        result = leo::sweep_error_model_2(load_policies(opt.checkpoints, "SAC3"), spec.sweep.error2_grid, spec);
      }
      leo::emit_csv(result, opt.out);
      std::cout << "wrote " << result.grid.size() << " rows to " << opt.out << '\n';
    } else if (*grad) {
      auto rng = leo::make_stream(grad_opt.seed.value_or(1), {0x67726164});
      double worst = 0.0;
      std::string report;
      for (int i = 0; i < networks; ++i) {
        const auto r = leo::check_random_network(rng);
        worst = std::max(worst, r.max_relative_error);
        report += "network " + std::to_string(i) + ": " + std::to_string(r.parameters_checked) +
                  " parameters, max relative error " + leo::format_number(r.max_relative_error) + '\n';
      }
      const auto a = leo::check_actor_loss(rng);
      worst = std::max(worst, a.max_relative_error);
      report += "actor loss: " + std::to_string(a.parameters_checked) + " parameters, max relative error " +
                leo::format_number(a.max_relative_error) + '\n';
      const bool ok = worst <= 1e-4;
      report += std::string(ok ? "PASS" : "FAIL") + " (tolerance 1e-4, worst " + leo::format_number(worst) + ")\n";
      std::cout << report;
      if (!grad_opt.out.empty()) {
        std::ofstream os(grad_opt.out);
        os << report;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
