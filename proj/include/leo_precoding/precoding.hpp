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

#ifndef LEO_PRECODING_PRECODING_HPP
#define LEO_PRECODING_PRECODING_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "leo_precoding/channel.hpp"

namespace leo {

/// (M*N) x K precoder; column k is user k's beam, row block m is satellite m.
struct PrecodingMatrix {
  Eigen::MatrixXcd w;
};

/// Frobenius power of each satellite's row block.
inline Eigen::VectorXd satellite_block_powers(const PrecodingMatrix& W, int num_sats) {
  const Eigen::Index n_ants = W.w.rows() / num_sats;
  Eigen::VectorXd p(num_sats);
  for (int m = 0; m < num_sats; ++m) p(m) = W.w.middleRows(m * n_ants, n_ants).squaredNorm();
  return p;
}

/// Sum over users of log(1 + SINR_k), natural log.
inline double sum_rate(const ChannelMatrix& H, const PrecodingMatrix& W, double noise_power) {
  if (H.antennas() != W.w.rows() || H.users() != W.w.cols())
    throw std::invalid_argument("sum_rate: channel/precoder shape mismatch");
  const Eigen::MatrixXd gains = (H.h * W.w).cwiseAbs2();
  double rate = 0.0;
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    const double signal = gains(k, k);
    const double interference = gains.row(k).sum() - signal;
    rate += std::log1p(signal / (noise_power + interference));
  }
  return rate;
}

/// Rescales W by one positive scalar so the most loaded satellite transmits
/// exactly P/M. Beam shapes and power ratios between satellites are kept.
inline PrecodingMatrix enforce_per_satellite_power(const PrecodingMatrix& W, double total_power, int num_sats) {
  if (num_sats < 1 || W.w.rows() % num_sats != 0)
    throw std::invalid_argument("enforce_per_satellite_power: rows not divisible by M");
  const double peak = satellite_block_powers(W, num_sats).maxCoeff();
  if (!(peak > 0) || !std::isfinite(peak))
    throw std::invalid_argument("enforce_per_satellite_power: precoder is zero or non-finite");
  return PrecodingMatrix{W.w * std::sqrt(total_power / num_sats / peak)};
}

/// Regularized channel inversion normalized to total power P, before any
/// per-satellite cap.
inline PrecodingMatrix mmse_precoder_total_power(const ChannelMatrix& H_est, double total_power, double noise_power) {
  const Eigen::Index users = H_est.users();
  if (H_est.h.squaredNorm() == 0.0) throw std::invalid_argument("mmse_precoder: zero channel estimate");
  const double reg = noise_power * static_cast<double>(users) / total_power;
  const Eigen::MatrixXcd hh = H_est.h.adjoint();
  // (H^H H + rI)^-1 H^H == H^H (H H^H + rI)^-1; factor whichever Gram is smaller.
  Eigen::MatrixXcd w;
  if (users <= H_est.antennas()) {
    Eigen::MatrixXcd gram = H_est.h * hh;
    gram.diagonal().array() += reg;
    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("mmse_precoder: regularized Gram matrix is singular");
    w = hh * llt.solve(Eigen::MatrixXcd::Identity(users, users));
  } else {
    Eigen::MatrixXcd gram = hh * H_est.h;
    gram.diagonal().array() += reg;
    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("mmse_precoder: regularized Gram matrix is singular");
    w = llt.solve(hh);
  }
  const double trace = w.squaredNorm();  // tr(W^H W)
  if (!(trace > 0) || !std::isfinite(trace)) throw std::runtime_error("mmse_precoder: degenerate solution");
  return PrecodingMatrix{w * std::sqrt(total_power / trace)};
}

/// MMSE precoder with the per-satellite cap P/M applied after trace normalization.
inline PrecodingMatrix mmse_precoder(const ChannelMatrix& H_est, double total_power, double noise_power, int num_sats) {
  return enforce_per_satellite_power(mmse_precoder_total_power(H_est, total_power, noise_power), total_power, num_sats);
}

/// Matched filter sqrt(P) h^H / ||h|| for a single user on its own resource.
inline Eigen::VectorXcd mrt_precoder(const Eigen::RowVectorXcd& h_est, double total_power) {
  const double norm = h_est.norm();
  if (!(norm > 0)) throw std::invalid_argument("mrt_precoder: zero channel");
  return std::sqrt(total_power) * h_est.adjoint() / norm;
}

/// Orthogonal multiple access: every user gets MRT on its own resource
/// (beam from the estimate, rate on the true channel), rate shared by K.
inline double oma_sum_rate(const ChannelMatrix& H, const ChannelMatrix& H_est, double total_power, double noise_power) {
  if (H.h.rows() != H_est.h.rows() || H.h.cols() != H_est.h.cols())
    throw std::invalid_argument("oma_sum_rate: shape mismatch");
  double rate = 0.0;
  for (Eigen::Index k = 0; k < H.users(); ++k) {
    const Eigen::VectorXcd w = mrt_precoder(H_est.h.row(k), total_power);
    const double gain = std::norm((H.h.row(k) * w)(0));
    rate += std::log1p(gain / noise_power);
  }
  return rate / static_cast<double>(H.users());
}

}  // namespace leo

#endif  // LEO_PRECODING_PRECODING_HPP
