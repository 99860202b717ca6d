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

#include <gtest/gtest.h>

#include "leo_precoding/geometry.hpp"

namespace leo {
namespace {

TEST(PlaceConstellation, SatellitesSymmetricAtAltitude) {
  ScenarioConfig c;
  auto rng = make_stream(3, StreamTag::placement);
  const Placement p = place_constellation(c, 30.0, rng);
  ASSERT_EQ(p.sat_x.size(), 2);
  EXPECT_DOUBLE_EQ(p.sat_x(0), -5000.0);
  EXPECT_DOUBLE_EQ(p.sat_x(1), 5000.0);
  EXPECT_TRUE((p.sat_z.array() == 600e3).all());
  EXPECT_TRUE((p.user_z.array() == 0.0).all());
}

TEST(PlaceConstellation, SpacingIsInterSatelliteDistance) {
  ScenarioConfig c;
  c.num_sats = 5;
  auto rng = make_stream(3, StreamTag::placement);
  const Placement p = place_constellation(c, 0.0, rng);
  for (int m = 1; m < 5; ++m) EXPECT_NEAR(p.sat_x(m) - p.sat_x(m - 1), c.inter_sat_distance, 1e-9);
  EXPECT_NEAR(p.sat_x.sum(), 0.0, 1e-9);
}

TEST(PlaceConstellation, ZeroJitterIsNominalAndSeedIndependent) {
  ScenarioConfig c;
  auto a = make_stream(1, StreamTag::placement);
  auto b = make_stream(999, StreamTag::placement);
  const Placement pa = place_constellation(c, 0.0, a);
  const Placement pb = place_constellation(c, 0.0, b);
  EXPECT_DOUBLE_EQ(pa.user_x(0), -1000.0);
  EXPECT_DOUBLE_EQ(pa.user_x(1), 0.0);
  EXPECT_DOUBLE_EQ(pa.user_x(2), 1000.0);
  EXPECT_EQ(pa.user_x, pb.user_x);
}

TEST(PlaceConstellation, JitterStaysWithinBound) {
  ScenarioConfig c;
  auto rng = make_stream(11, StreamTag::placement);
  const double nominal[3] = {-1000.0, 0.0, 1000.0};
  for (int i = 0; i < 10000; ++i) {
    const Placement p = place_constellation(c, 30.0, rng);
    for (int k = 0; k < 3; ++k) ASSERT_LE(std::abs(p.user_x(k) - nominal[k]), 30.0);
  }
}

TEST(PlaceConstellation, JitterMeanWithinStandardErrorBound) {
  ScenarioConfig c;
  c.num_users = 1;
  const double bound = 30.0;
  const int draws = 100000;
  auto rng = make_stream(12, StreamTag::placement);
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += place_constellation(c, bound, rng).user_x(0);
  EXPECT_LE(std::abs(sum / draws), 3.0 * bound / std::sqrt(3.0 * draws));
}

TEST(PlaceConstellation, RejectsNegativeJitter) {
  ScenarioConfig c;
  auto rng = make_stream(1, StreamTag::placement);
  EXPECT_THROW(place_constellation(c, -1.0, rng), std::invalid_argument);
}

Placement single_pair(double user_x, double sat_x, double altitude) {
  Placement p;
  p.sat_x = Eigen::VectorXd::Constant(1, sat_x);
  p.sat_z = Eigen::VectorXd::Constant(1, altitude);
  p.user_x = Eigen::VectorXd::Constant(1, user_x);
  p.user_z = Eigen::VectorXd::Zero(1);
  return p;
}

TEST(PairDistances, VerticalAndOffsetCases) {
  EXPECT_DOUBLE_EQ(pair_distances(single_pair(0.0, 0.0, 600e3))(0, 0), 600e3);
  EXPECT_NEAR(pair_distances(single_pair(5000.0, 0.0, 600e3))(0, 0), std::sqrt(600000.0 * 600000.0 + 5000.0 * 5000.0),
              1e-9);
}

TEST(PairDistances, ReflectionSymmetricAndAboveAltitude) {
  ScenarioConfig c;
  auto rng = make_stream(5, StreamTag::placement);
  Placement p = place_constellation(c, 30.0, rng);
  const Eigen::MatrixXd d = pair_distances(p);
  EXPECT_TRUE((d.array() >= c.sat_altitude).all());
  Placement mirrored = p;
  mirrored.sat_x = -p.sat_x;
  mirrored.user_x = -p.user_x;
  EXPECT_TRUE(pair_distances(mirrored).isApprox(d, 1e-15));
}

TEST(AodCosines, BroadsideOffsetAndLimit) {
  EXPECT_DOUBLE_EQ(aod_cosines(single_pair(0.0, 0.0, 600e3))(0, 0), 0.0);
  EXPECT_NEAR(aod_cosines(single_pair(5000.0, 0.0, 600e3))(0, 0),
              5000.0 / std::sqrt(600000.0 * 600000.0 + 5000.0 * 5000.0), 1e-15);
  EXPECT_NEAR(aod_cosines(single_pair(1e12, 0.0, 600e3))(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(aod_cosines(single_pair(-1e12, 0.0, 600e3))(0, 0), -1.0, 1e-9);
}

TEST(AodCosines, AlwaysWithinUnitInterval) {
  ScenarioConfig c;
  c.mean_user_distance = 200e3;
  auto rng = make_stream(6, StreamTag::placement);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd cosines = aod_cosines(place_constellation(c, 5000.0, rng));
    EXPECT_TRUE((cosines.array().abs() <= 1.0).all());
  }
}

TEST(ScenarioConfig, DefaultsAreValidAndSpacingIsThreeHalfWavelengths) {
  ScenarioConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_DOUBLE_EQ(c.inter_ant_distance, 1.5 * c.wavelength);
  EXPECT_NEAR(c.gain_sat, std::pow(10.0, 1.4), 1e-12);
  EXPECT_EQ(c.state_dim(), 24);
}

TEST(ScenarioConfig, RejectsInvalidValues) {
  ScenarioConfig c;
  c.num_users = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = ScenarioConfig{};
  c.noise_power = 0.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = ScenarioConfig{};
  c.wavelength = -0.1;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

}  // namespace
}  // namespace leo
