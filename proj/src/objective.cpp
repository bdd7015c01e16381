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

#include "tpc/objective.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tpc {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void check_inputs(std::span<const double> p, const ChannelMatrix& h) {
  if (p.size() != h.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(p.size()) +
                                " powers for " + std::to_string(h.size()) + " links");
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw NonFiniteError("non-finite transmit power");
    if (v < 0.0) throw std::invalid_argument("negative transmit power");
  }
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NonFiniteError(std::string("non-finite ") + what);
  }
}

// Interference plus noise at every receiver.
void interference(std::span<const double> p, const ChannelMatrix& h, std::span<double> eta) {
  const std::size_t n = h.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m != k) acc += p[m] * h(m, k);
    }
    eta[k] = acc + h.noise_power();
  }
}

}  // namespace

PowerVector::PowerVector(std::vector<double> p, double p_max_w)
    : p_(std::move(p)), p_max_w_(p_max_w) {
  if (!(p_max_w_ > 0.0) || !std::isfinite(p_max_w_)) {
    throw std::invalid_argument("p_max must be positive and finite");
  }
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= p_max_w_)) {
      throw std::invalid_argument("power " + std::to_string(i) + " outside [0, p_max]");
    }
  }
}

PowerVector PowerVector::full(std::size_t n, double p_max_w) {
  return PowerVector(std::vector<double>(n, p_max_w), p_max_w);
}

std::vector<double> sinr(std::span<const double> p, const ChannelMatrix& h) {
  check_inputs(p, h);
  const std::size_t n = h.size();
  std::vector<double> eta(n);
  interference(p, h, eta);
  std::vector<double> zeta(n);
  for (std::size_t k = 0; k < n; ++k) zeta[k] = p[k] * h.direct(k) / eta[k];
  check_finite(zeta, "SINR");
  return zeta;
}

std::vector<double> link_rates(std::span<const double> p, const ChannelMatrix& h) {
  std::vector<double> r = sinr(p, h);
  for (double& v : r) v = std::log2(1.0 + v);
  return r;
}

double sum_rate(std::span<const double> p, const ChannelMatrix& h) {
  double total = 0.0;
  for (double r : link_rates(p, h)) total += r;
  if (!std::isfinite(total)) throw NonFiniteError("non-finite sum rate");
  return total;
}

std::vector<double> grad_rho(std::span<const double> p, const ChannelMatrix& h) {
  check_inputs(p, h);
  const std::size_t n = h.size();
  std::vector<double> eta(n);
  interference(p, h, eta);

  // d zeta_k / d p_n is h(n,n)/eta_n on the diagonal and
  // -p_k h(k,k) h(n,k) / eta_k^2 off it; d log2(1+zeta)/d zeta = 1/((1+zeta) ln 2).
  std::vector<double> w(n);
  std::vector<double> cross(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double zeta = p[k] * h.direct(k) / eta[k];
    w[k] = 1.0 / (1.0 + zeta);
    cross[k] = w[k] * p[k] * h.direct(k) / (eta[k] * eta[k]);
  }

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double coupling = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) coupling += cross[k] * h(i, k);
    }
    const double own = w[i] * h.direct(i) / eta[i];
    g[i] = -kInvLn2 * (own - coupling);
  }
  check_finite(g, "gradient");
  return g;
}

void psi_phi_into(std::span<const double> p, const ChannelMatrix& h, GradDecomposition& out) {
  check_inputs(p, h);
  const std::size_t n = h.size();
  out.psi.resize(n);
  out.phi.resize(n);
  out.gamma.resize(n);
  out.eta.resize(n);
  interference(p, h, out.eta);
  for (std::size_t k = 0; k < n; ++k) {
    out.gamma[k] = out.eta[k] + p[k] * h.direct(k);
    out.psi[k] = kInvLn2 * h.direct(k) / out.gamma[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      acc += h.direct(k) * h(i, k) * p[k] / (out.eta[k] * out.gamma[k]);
    }
    out.phi[i] = kInvLn2 * acc;
  }
  check_finite(out.psi, "psi");
  check_finite(out.phi, "phi");
}

GradDecomposition psi_phi(std::span<const double> p, const ChannelMatrix& h) {
  GradDecomposition d;
  psi_phi_into(p, h, d);
  return d;
}

std::vector<double> psi_phi_vjp(std::span<const double> p, const ChannelMatrix& h,
                                const GradDecomposition& d, std::span<const double> psi_bar,
                                std::span<const double> phi_bar) {
  const std::size_t n = h.size();
  if (p.size() != n || psi_bar.size() != n || phi_bar.size() != n || d.psi.size() != n) {
    throw std::invalid_argument("psi_phi_vjp: dimension mismatch");
  }

  // Phi_i = c sum_{k != i} h(i,k) s_k with s_k = h(k,k) p_k / (eta_k gamma_k).
  std::vector<double> p_bar(n, 0.0);
  std::vector<double> eta_bar(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s_bar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k) s_bar += phi_bar[i] * h(i, k);
    }
    s_bar *= kInvLn2;

    const double dk = h.direct(k);
    const double eta = d.eta[k];
    const double gamma = d.gamma[k];
    double gamma_bar = -kInvLn2 * dk / (gamma * gamma) * psi_bar[k];
    p_bar[k] += s_bar * dk / (eta * gamma);
    eta_bar[k] = -s_bar * dk * p[k] / (eta * eta * gamma);
    gamma_bar -= s_bar * dk * p[k] / (eta * gamma * gamma);

    // gamma_k = eta_k + p_k h(k,k)
    eta_bar[k] += gamma_bar;
    p_bar[k] += gamma_bar * dk;
  }
  // eta_k = sigma^2 + sum_{m != k} p_m h(m,k)
  for (std::size_t m = 0; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != m) acc += eta_bar[k] * h(m, k);
    }
    p_bar[m] += acc;
  }
  check_finite(p_bar, "psi/phi adjoint");
  return p_bar;
}

double clamp_power(double value, double p_max_w) {
  if (std::isnan(value)) throw NonFiniteError("NaN power in projection");
  if (value < 0.0) return 0.0;
  if (value > p_max_w) return p_max_w;
  return value;
}

PowerVector project_box(std::span<const double> p_raw, double p_max_w) {
  if (!(p_max_w > 0.0)) throw std::invalid_argument("p_max must be > 0");
  std::vector<double> p(p_raw.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = clamp_power(p_raw[i], p_max_w);
  return PowerVector(std::move(p), p_max_w);
}

}  // namespace tpc
