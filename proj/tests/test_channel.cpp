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

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "leo_precoding/channel.hpp"

namespace leo {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(SteeringVector, BroadsideIsAllOnes) {
  const Eigen::VectorXcd v = steering_vector(0.0, 4, 0.225, 0.15);
  for (int n = 0; n < 4; ++n) {
    EXPECT_DOUBLE_EQ(v(n).real(), 1.0);
    EXPECT_DOUBLE_EQ(v(n).imag(), 0.0);
  }
}

TEST(SteeringVector, TwoAntennasEndfire) {
  const Eigen::VectorXcd v = steering_vector(1.0, 2, 1.5 * 0.15, 0.15);
  EXPECT_NEAR(std::abs(v(0) - cd(0.0, 1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(v(1) - cd(0.0, -1.0)), 0.0, 1e-12);
}

TEST(SteeringVector, ConjugateSymmetricAndUnitModulus) {
  for (double c : {0.1, 0.37, -0.8, 1.0}) {
    const Eigen::VectorXcd plus = steering_vector(c, 5, 0.225, 0.15);
    const Eigen::VectorXcd minus = steering_vector(-c, 5, 0.225, 0.15);
    EXPECT_TRUE(minus.isApprox(plus.conjugate(), 1e-14));
    EXPECT_TRUE((plus.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
}

TEST(SteeringVector, RejectsInvalidCosine) {
  EXPECT_THROW(steering_vector(1.0001, 2, 0.225, 0.15), std::invalid_argument);
  EXPECT_THROW(steering_vector(0.0, 0, 0.225, 0.15), std::invalid_argument);
}

TEST(OverallPhase, ExactCases) {
  EXPECT_NEAR(overall_phase(0.15, 0.15), 0.0, 1e-12);
  EXPECT_NEAR(overall_phase(1.25 * 0.15, 0.15), kPi / 2, 1e-12);
  EXPECT_NEAR(overall_phase(600000.0, 0.15), 0.0, 1e-6);
  for (double d : {1.0, 123.456, 600123.4567}) {
    const double phi = overall_phase(d, 0.15);
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, 2 * kPi);
  }
}

TEST(ChannelVector, AmplitudeAtAltitude) {
  ScenarioConfig c;
  const Eigen::VectorXcd h = channel_vector(600e3, 0.3, 0.01, c);
  const double expected = 0.15 * std::sqrt(std::pow(10.0, 1.4)) / (4.0 * kPi * 6e5);
  EXPECT_NEAR(expected, 9.97e-8, 0.01e-8);
  for (int n = 0; n < h.size(); ++n) EXPECT_NEAR(std::abs(h(n)), expected, 1e-22);
}

TEST(ChannelVector, BroadsideZeroPhaseIsRealPositive) {
  ScenarioConfig c;
  const Eigen::VectorXcd h = channel_vector(600e3, 0.0, 0.0, c);
  EXPECT_GT(h(0).real(), 0.0);
  EXPECT_DOUBLE_EQ(h(0).imag(), 0.0);
  EXPECT_EQ(h(0), h(1));
}

TEST(ChannelVector, InverseDistanceAmplitude) {
  ScenarioConfig c;
  const Eigen::VectorXcd near = channel_vector(600e3, 1.0, 0.2, c);
  const Eigen::VectorXcd far = channel_vector(1200e3, 1.0, 0.2, c);
  for (int n = 0; n < 2; ++n) EXPECT_NEAR(std::abs(far(n)) / std::abs(near(n)), 0.5, 1e-14);
  EXPECT_THROW(channel_vector(0.0, 0.0, 0.0, c), std::invalid_argument);
}

Placement one_user_one_sat(double user_x) {
  Placement p;
  p.sat_x = Eigen::VectorXd::Zero(1);
  p.sat_z = Eigen::VectorXd::Constant(1, 600e3);
  p.user_x = Eigen::VectorXd::Constant(1, user_x);
  p.user_z = Eigen::VectorXd::Zero(1);
  return p;
}

TEST(BuildTrueChannel, SingleLinkEqualsChannelVector) {
  ScenarioConfig c;
  c.num_sats = 1;
  c.num_users = 1;
  const Placement p = one_user_one_sat(1234.5);
  const ChannelMatrix H = build_true_channel(p, c);
  const double d = std::hypot(1234.5, 600e3);
  const Eigen::VectorXcd v = channel_vector(d, overall_phase(d, c.wavelength), 1234.5 / d, c);
  ASSERT_EQ(H.h.rows(), 1);
  ASSERT_EQ(H.h.cols(), 2);
  EXPECT_TRUE(H.h.row(0).transpose().isApprox(v, 1e-15));
}

TEST(BuildTrueChannel, SpotValueMatchesScalarFormula) {
  ScenarioConfig c;
  auto rng = make_stream(21, StreamTag::placement);
  const Placement p = place_constellation(c, 30.0, rng);
  const ChannelMatrix H = build_true_channel(p, c);
  // Scalar re-derivation for user 2, satellite 0, antenna n = 2 (1-based).
  const double dx = p.user_x(2) - p.sat_x(0);
  const double d = std::sqrt(dx * dx + 600e3 * 600e3);
  const double cycles = d / 0.15;
  const double phi = 2 * kPi * (cycles - std::floor(cycles));
  const double amp = 0.15 * std::sqrt(std::pow(10.0, 1.4)) / (4 * kPi * d);
  const double ramp = -kPi * 1.5 * (2 + 1 - 2 * 2) * (dx / d);
  const cd expected = amp * std::exp(cd(0.0, -phi)) * std::exp(cd(0.0, ramp));
  EXPECT_NEAR(std::abs(H.h(2, 1) - expected) / amp, 0.0, 1e-9);
}

TEST(BuildTrueChannel, BlockMagnitudeFallsWithHorizontalOffset) {
  ScenarioConfig c;
  c.num_sats = 1;
  c.num_users = 1;
  double previous = std::numeric_limits<double>::infinity();
  for (double x : {0.0, 1000.0, 5000.0, 20000.0, 100000.0}) {
    const double mag = std::abs(build_true_channel(one_user_one_sat(x), c).h(0, 0));
    EXPECT_LT(mag, previous);
    previous = mag;
  }
}

TEST(BuildTrueChannel, DeterministicAndConstantBlockMagnitude) {
  ScenarioConfig c;
  auto rng = make_stream(2, StreamTag::placement);
  const Placement p = place_constellation(c, 30.0, rng);
  const ChannelMatrix a = build_true_channel(p, c);
  const ChannelMatrix b = build_true_channel(p, c);
  EXPECT_EQ(a.h, b.h);
  const Eigen::MatrixXd d = pair_distances(p);
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) EXPECT_NEAR(std::abs(a.h(k, m * 2 + n)), path_amplitude(d(k, m), c), 1e-22);
}

class ErrorModelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto rng = make_stream(8, StreamTag::placement);
    H = build_true_channel(place_constellation(c, 30.0, rng), c);
  }
  ScenarioConfig c;
  ChannelMatrix H;
};

TEST_F(ErrorModelTest, ZeroBoundIsIdentity) {
  auto rng = make_stream(1, StreamTag::channel_error);
  EXPECT_EQ(apply_error_model_1(H, 0.0, c, rng).h, H.h);
  auto rng2 = make_stream(1, StreamTag::channel_error);
  EXPECT_EQ(apply_error_model_2(H, 0.0, 0.0, c, rng2).h, H.h);
}

TEST_F(ErrorModelTest, MagnitudesPreserved) {
  auto rng = make_stream(2, StreamTag::channel_error);
  for (int i = 0; i < 100; ++i) {
    const ChannelMatrix e1 = apply_error_model_1(H, 0.3, c, rng);
    const ChannelMatrix e2 = apply_error_model_2(H, 0.3, 0.5, c, rng);
    EXPECT_LE(((e1.h.cwiseAbs() - H.h.cwiseAbs()).cwiseQuotient(H.h.cwiseAbs())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(((e2.h.cwiseAbs() - H.h.cwiseAbs()).cwiseQuotient(H.h.cwiseAbs())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ErrorVector, FixedEpsilonRotation) {
  const Eigen::VectorXcd v = phase_ramp(0.1, 2, 1.5 * 0.15, 0.15);
  EXPECT_NEAR(std::arg(v(0)), -0.4712388980384690, 1e-12);
  EXPECT_NEAR(std::arg(v(1)), 0.4712388980384690, 1e-12);
}

TEST_F(ErrorModelTest, ModelOneIsPerPairPhaseRampWithinBound) {
  auto rng = make_stream(3, StreamTag::channel_error);
  const double delta = 0.2;
  for (int i = 0; i < 200; ++i) {
    const ChannelMatrix e = apply_error_model_1(H, delta, c, rng);
    for (int k = 0; k < 3; ++k) {
      for (int m = 0; m < 2; ++m) {
        // Ratio on antenna 1 is exp(-j pi 1.5 (N+1-2) eps) = exp(-j 1.5 pi eps).
        const cd r0 = e.h(k, 2 * m) / H.h(k, 2 * m);
        const cd r1 = e.h(k, 2 * m + 1) / H.h(k, 2 * m + 1);
        const double eps = -std::arg(r0) / (1.5 * kPi);
        EXPECT_LE(std::abs(eps), delta + 1e-12);
        EXPECT_NEAR(std::abs(r1 - std::conj(r0)), 0.0, 1e-12);
      }
    }
  }
}

TEST_F(ErrorModelTest, ModelTwoWithZeroSigmaMatchesModelOne) {
  auto a = make_stream(4, StreamTag::channel_error);
  auto b = make_stream(4, StreamTag::channel_error);
  EXPECT_EQ(apply_error_model_2(H, 0.1, 0.0, c, a).h, apply_error_model_1(H, 0.1, c, b).h);
}

TEST_F(ErrorModelTest, ModelTwoPhaseVarianceMatchesSigma) {
  const double sigma = 0.3;
  auto rng = make_stream(5, StreamTag::channel_error);
  double sum = 0.0;
  double sum_sq = 0.0;
  long long n = 0;
  while (n < 100000) {
    const ChannelMatrix e = apply_error_model_2(H, 0.0, sigma, c, rng);
    for (int k = 0; k < 3; ++k) {
      for (int m = 0; m < 2; ++m) {
        const double z0 = -std::arg(e.h(k, 2 * m) / H.h(k, 2 * m));
        const double z1 = -std::arg(e.h(k, 2 * m + 1) / H.h(k, 2 * m + 1));
        ASSERT_NEAR(z0, z1, 1e-12);  // one zeta per pair, shared by its antennas
        sum += z0;
        sum_sq += z0 * z0;
        ++n;
      }
    }
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(var, sigma * sigma, 0.05 * sigma * sigma);
}

TEST_F(ErrorModelTest, ApplyErrorDispatch) {
  auto rng = make_stream(6, StreamTag::channel_error);
  EXPECT_EQ(apply_error(H, ErrorConfig{}, c, rng).h, H.h);
  EXPECT_THROW(apply_error_model_1(H, -0.1, c, rng), std::invalid_argument);
  EXPECT_THROW(apply_error_model_2(H, 0.1, -0.1, c, rng), std::invalid_argument);
}

}  // namespace
}  // namespace leo
