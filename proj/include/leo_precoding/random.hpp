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

#ifndef LEO_PRECODING_RANDOM_HPP
#define LEO_PRECODING_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace leo {

using RandomStream = std::mt19937_64;

// Independent purposes drawn from one master seed.
enum class StreamTag : std::uint32_t {
  placement = 1,
  channel_error = 2,
  network_init = 3,
  action_sampling = 4,
  buffer_sampling = 5,
  monte_carlo = 6,
};

/// Derives a random stream from a master seed and a path of integer keys.
/// Identical (seed, keys) always yield identical streams, so work that is
/// pre-assigned a key path is reproducible regardless of execution order.
inline RandomStream make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> material{static_cast<std::uint32_t>(master_seed),
                                      static_cast<std::uint32_t>(master_seed >> 32)};
  for (auto k : keys) {
    material.push_back(static_cast<std::uint32_t>(k));
    material.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(material.begin(), material.end());
  return RandomStream(seq);
}

inline RandomStream make_stream(std::uint64_t master_seed, StreamTag tag) {
  return make_stream(master_seed, {static_cast<std::uint64_t>(tag)});
}

}  // namespace leo

#endif  // LEO_PRECODING_RANDOM_HPP
