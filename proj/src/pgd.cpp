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

#include "tpc/pgd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tpc {

PowerVector initial_power(const PowerInit& init, std::size_t n, double p_max_w, Rng& rng) {
  switch (init.rule) {
    case InitRule::kMaxPower:
      return PowerVector::full(n, p_max_w);
    case InitRule::kUniformRandom: {
      std::uniform_real_distribution<double> u(0.0, p_max_w);
      std::vector<double> p(n);
      for (double& v : p) v = u(rng);
      return PowerVector(std::move(p), p_max_w);
    }
    case InitRule::kConstant:
      if (!(init.value_w >= 0.0 && init.value_w <= p_max_w)) {
        throw std::invalid_argument("pgd.init_value_w must lie in [0, p_max]");
      }
      return PowerVector(std::vector<double>(n, init.value_w), p_max_w);
  }
  throw std::invalid_argument("unknown init rule");
}

void PgdConfig::validate() const {
  if (!(step_size > 0.0 && step_size < 1.0)) {
    throw std::invalid_argument("pgd.step_size must lie in (0, 1)");
  }
  if (max_iters == 0) throw std::invalid_argument("pgd.max_iters must be >= 1");
  if (!(early_stop_tol >= 0.0)) throw std::invalid_argument("pgd.early_stop_tol must be >= 0");
}

SolveResult run_pgd(const ChannelMatrix& h, const PgdConfig& cfg, double p_max_w, Rng& rng) {
  cfg.validate();
  return run_pgd_from(h, cfg, initial_power(cfg.init, h.size(), p_max_w, rng));
}

SolveResult run_pgd_from(const ChannelMatrix& h, const PgdConfig& cfg, const PowerVector& p0) {
  cfg.validate();
  const std::size_t n = h.size();
  if (p0.size() != n) throw std::invalid_argument("initial power has wrong dimension");
  const double p_max = p0.p_max();
  const double lambda = cfg.step_size;
  const bool track = cfg.record_trajectory || cfg.early_stop_tol > 0.0;

  std::vector<double> p(p0.values().begin(), p0.values().end());
  GradDecomposition d;
  SolveResult result;
  double previous = track ? sum_rate(p, h) : 0.0;

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    try {
      psi_phi_into(p, h, d);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = clamp_power(weighted_step(p[i], d.psi[i], d.phi[i], -lambda, lambda), p_max);
      }
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("pgd iteration " + std::to_string(k) + ": " + e.what());
    }
    result.iterations_run = k;
    if (!track) continue;

    const double current = sum_rate(p, h);
    if (cfg.record_trajectory) result.trajectory.push_back(current);
    if (current < previous) ++result.non_monotone_steps;
    const bool converged = cfg.early_stop_tol > 0.0 &&
                           std::abs(current - previous) <=
                               cfg.early_stop_tol * std::max(1.0, std::abs(current));
    previous = current;
    if (converged) break;
  }

  result.p_final = PowerVector(std::move(p), p_max);
  result.sum_rate_final = sum_rate(result.p_final.values(), h);
  return result;
}

GridResult brute_force_grid(const ChannelMatrix& h, double p_max_w, std::size_t grid_points) {
  const std::size_t n = h.size();
  if (n > kMaxGridLinks) {
    throw std::invalid_argument("grid search supports at most " + std::to_string(kMaxGridLinks) +
                                " links, got " + std::to_string(n));
  }
  if (grid_points < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  if (!(p_max_w > 0.0)) throw std::invalid_argument("p_max must be > 0");

  const double spacing = p_max_w / static_cast<double>(grid_points - 1);
  auto level = [&](std::size_t idx) {
    return idx + 1 == grid_points ? p_max_w : spacing * static_cast<double>(idx);
  };

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> p(n);
  std::vector<double> best_p(n, 0.0);
  double best = -1.0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) p[i] = level(idx[i]);
    const double value = sum_rate(p, h);
    if (value > best) {
      best = value;
      best_p = p;
    }
    // Odometer increment, last axis fastest.
    std::size_t axis = n;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < grid_points) break;
      idx[axis] = 0;
      if (axis == 0) return GridResult{PowerVector(std::move(best_p), p_max_w), best};
    }
  }
}

}  // namespace tpc
