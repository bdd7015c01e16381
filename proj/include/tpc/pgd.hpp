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

// Fixed-step projected gradient descent on the negative sum rate, and an
// exhaustive grid search used as a small-N optimality oracle.

#pragma once

#include <cstddef>
#include <vector>

#include "tpc/channel_model.hpp"
#include "tpc/objective.hpp"
#include "tpc/random.hpp"

namespace tpc {

enum class InitRule { kMaxPower, kUniformRandom, kConstant };

struct PowerInit {
  InitRule rule = InitRule::kMaxPower;
  double value_w = 0.0;  // used by kConstant only
};

/// Initial feasible power vector. Only kUniformRandom consumes randomness.
PowerVector initial_power(const PowerInit& init, std::size_t n, double p_max_w, Rng& rng);

struct PgdConfig {
  double step_size = 0.1;
  std::size_t max_iters = 1000;
  PowerInit init;
  bool record_trajectory = false;
  /// Stop once |R_k - R_{k-1}| <= tol * max(1, |R_k|). Zero disables it.
  double early_stop_tol = 0.0;

  void validate() const;
};

struct SolveResult {
  PowerVector p_final;
  double sum_rate_final = 0.0;
  /// trajectory[k] is the sum rate after iteration k + 1.
  std::vector<double> trajectory;
  std::size_t iterations_run = 0;
  /// Iterations whose sum rate dropped below the previous one (only counted
  /// when the sum rate is tracked).
  std::size_t non_monotone_steps = 0;
};

SolveResult run_pgd(const ChannelMatrix& h, const PgdConfig& cfg, double p_max_w, Rng& rng);

/// Same as run_pgd but starting from an explicit feasible point.
SolveResult run_pgd_from(const ChannelMatrix& h, const PgdConfig& cfg, const PowerVector& p0);

struct GridResult {
  PowerVector best;
  double sum_rate = 0.0;
};

inline constexpr std::size_t kMaxGridLinks = 3;

/// Exhaustive search over {0, ..., p_max}^N with grid_points per axis.
/// Ties keep the first point in lexicographic order.
GridResult brute_force_grid(const ChannelMatrix& h, double p_max_w, std::size_t grid_points);

}  // namespace tpc
