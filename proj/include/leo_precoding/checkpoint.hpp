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

#ifndef LEO_PRECODING_CHECKPOINT_HPP
#define LEO_PRECODING_CHECKPOINT_HPP

// Binary checkpoint layout (host byte order, little-endian on supported platforms):
//
//   char[8]  magic "LEOSAC01"
//   u32      scalar width in bytes (4 = float32, 8 = float64)
//   i64      training step counter
//   f64      log temperature alpha
//   f64      last entropy estimate
//   network  actor,   optimizer state (first moment net, second moment net, i64 step)
//   network  critic1, optimizer state
//   network  critic2, optimizer state
//
// A network is u32 layer count followed, per layer in forward order, by
// u32 rows (out), u32 cols (in), u8 activation (0 relu, 1 linear), the weight
// matrix in row-major order and then the bias vector.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "leo_precoding/neural.hpp"
#include "leo_precoding/sac.hpp"

namespace leo {

namespace detail {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: unexpected end of data");
  return v;
}

inline constexpr std::array<char, 8> kCheckpointMagic{'L', 'E', 'O', 'S', 'A', 'C', '0', '1'};

}  // namespace detail

template <typename Scalar>
void write_network(std::ostream& os, const DenseNetwork<Scalar>& net) {
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& l : net.layers) {
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(l.weight.rows()));
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(l.weight.cols()));
    detail::put<std::uint8_t>(os, l.activation == Activation::relu ? 0 : 1);
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) detail::put<Scalar>(os, l.weight(i, j));
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) detail::put<Scalar>(os, l.bias(i));
  }
}

template <typename Scalar>
DenseNetwork<Scalar> read_network(std::istream& is) {
  const auto count = detail::get<std::uint32_t>(is);
  if (count == 0 || count > 1024) throw std::runtime_error("checkpoint: implausible layer count");
  DenseNetwork<Scalar> net;
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto rows = detail::get<std::uint32_t>(is);
    const auto cols = detail::get<std::uint32_t>(is);
    const auto act = detail::get<std::uint8_t>(is);
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20) || act > 1)
      throw std::runtime_error("checkpoint: corrupt layer header");
    if (!net.layers.empty() && net.layers.back().out_dim() != cols)
      throw std::runtime_error("checkpoint: layer dimensions do not chain");
    DenseLayer<Scalar> l;
    l.weight.resize(rows, cols);
    l.bias.resize(rows);
    l.activation = act == 0 ? Activation::relu : Activation::linear;
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = detail::get<Scalar>(is);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = detail::get<Scalar>(is);
    net.layers.push_back(std::move(l));
  }
  return net;
}

template <typename Scalar>
void write_checkpoint(std::ostream& os, const SacNetworks<Scalar>& n) {
  os.write(detail::kCheckpointMagic.data(), detail::kCheckpointMagic.size());
  detail::put<std::uint32_t>(os, sizeof(Scalar));
  detail::put<std::int64_t>(os, n.step);
  detail::put<double>(os, n.temperature.log_alpha);
  detail::put<double>(os, n.temperature.entropy_estimate);
  auto put_pair = [&os](const DenseNetwork<Scalar>& net, const OptimizerState<Scalar>& opt) {
    write_network(os, net);
    write_network(os, opt.first_moment);
    write_network(os, opt.second_moment);
    detail::put<std::int64_t>(os, opt.step);
  };
  put_pair(n.actor, n.actor_opt);
  put_pair(n.critic1, n.critic1_opt);
  put_pair(n.critic2, n.critic2_opt);
}

template <typename Scalar>
SacNetworks<Scalar> read_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != detail::kCheckpointMagic) throw std::runtime_error("checkpoint: bad magic");
  if (detail::get<std::uint32_t>(is) != sizeof(Scalar)) throw std::runtime_error("checkpoint: scalar width mismatch");
  SacNetworks<Scalar> n;
  n.step = detail::get<std::int64_t>(is);
  n.temperature.log_alpha = detail::get<double>(is);
  n.temperature.entropy_estimate = detail::get<double>(is);
  auto get_pair = [&is](DenseNetwork<Scalar>& net, OptimizerState<Scalar>& opt) {
    net = read_network<Scalar>(is);
    opt.first_moment = read_network<Scalar>(is);
    opt.second_moment = read_network<Scalar>(is);
    opt.step = detail::get<std::int64_t>(is);
  };
  get_pair(n.actor, n.actor_opt);
  get_pair(n.critic1, n.critic1_opt);
  get_pair(n.critic2, n.critic2_opt);
  return n;
}

template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path, const SacNetworks<Scalar>& n) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(os, n);
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

template <typename Scalar>
SacNetworks<Scalar> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return read_checkpoint<Scalar>(is);
}

}  // namespace leo

#endif  // LEO_PRECODING_CHECKPOINT_HPP
