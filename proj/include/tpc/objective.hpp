// Copyright 2026 The tpc Authors
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

// Sum-rate objective over an interference channel and its gradient.
//
// For link n with receiver-side quantities
//
//   eta_n   = sum_{m != n} p_m h(m, n) + sigma^2      (interference plus noise)
//   gamma_n = eta_n + p_n h(n, n)                     (total received power)
//
// the objective is rho(p) = -sum_n log2(gamma_n / eta_n) and
//
//   d rho / d p_n = -Psi_n + Phi_n
//   Psi_n = h(n, n) / (gamma_n ln 2)
//   Phi_n = sum_{k != n} h(k, k) h(n, k) p_k / (eta_k gamma_k ln 2).
//
// Psi is the own-link term; Phi is the interference that transmitter n
// causes at every other receiver.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tpc/channel_model.hpp"

namespace tpc {

/// Raised when an intermediate value turns NaN or infinite.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transmit powers in watts, each inside [0, p_max].
class PowerVector {
 public:
  PowerVector() = default;
  /// Throws std::invalid_argument unless every entry is finite and in the box.
  PowerVector(std::vector<double> p, double p_max_w);

  static PowerVector full(std::size_t n, double p_max_w);

  std::size_t size() const { return p_.size(); }
  double p_max() const { return p_max_w_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  friend bool operator==(const PowerVector&, const PowerVector&) = default;

 private:
  std::vector<double> p_;
  double p_max_w_ = 0.0;
};

struct GradDecomposition {
  std::vector<double> psi;
  std::vector<double> phi;
  std::vector<double> gamma;
  std::vector<double> eta;
};

/// zeta_n = p_n h(n,n) / (sum_{m != n} p_m h(m,n) + sigma^2).
std::vector<double> sinr(std::span<const double> p, const ChannelMatrix& h);

/// Per-link spectral efficiency log2(1 + zeta_n) in bps/Hz.
std::vector<double> link_rates(std::span<const double> p, const ChannelMatrix& h);

double sum_rate(std::span<const double> p, const ChannelMatrix& h);

/// Gradient of rho = -sum_rate with respect to p, evaluated through the
/// SINR chain rule (independent of psi_phi).
std::vector<double> grad_rho(std::span<const double> p, const ChannelMatrix& h);

GradDecomposition psi_phi(std::span<const double> p, const ChannelMatrix& h);

/// Allocation-free variant; `out` vectors are resized as needed.
void psi_phi_into(std::span<const double> p, const ChannelMatrix& h, GradDecomposition& out);

/// Vector-Jacobian product of psi_phi: given upstream sensitivities of a
/// scalar to Psi and Phi, returns its sensitivity to p. `d` must be the
/// decomposition evaluated at p.
std::vector<double> psi_phi_vjp(std::span<const double> p, const ChannelMatrix& h,
                                const GradDecomposition& d, std::span<const double> psi_bar,
                                std::span<const double> phi_bar);

/// Elementwise clamp to [0, p_max]. NaN input is an error, never clamped.
PowerVector project_box(std::span<const double> p_raw, double p_max_w);

/// Clamp of a single coordinate with the same NaN contract.
double clamp_power(double value, double p_max_w);

/// Pre-projection update shared by iterative PGD and the unrolled network:
/// p - (c_psi * psi + c_phi * phi). With (c_psi, c_phi) = (-step, +step) this
/// is p - step * grad_rho.
inline double weighted_step(double p, double psi, double phi, double c_psi, double c_phi) {
  return p - (c_psi * psi + c_phi * phi);
}

}  // namespace tpc
