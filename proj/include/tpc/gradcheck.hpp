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

#pragma once

#include <cstddef>
#include <cstdint>

#include "tpc/channel_model.hpp"

namespace tpc {

struct GradcheckConfig {
  ScenarioSpec scenario;  // n_links is overridden per suite
  PropagationParams propagation;
  double p_max_w = 10.0;
  std::uint64_t seed = 1;
  std::size_t instances = 20;
};

struct GradcheckResult {
  double grad_rho_max_rel_error = 0.0;
  std::size_t grad_rho_checks = 0;
  double backward_max_rel_error = 0.0;
  std::size_t backward_checks = 0;
};

/// Central finite differences against grad_rho (N in {1, 2, 5, 10}) and
/// against backward (both variants, K in {1, 3, 5}, N in {2, 4}).
GradcheckResult run_gradcheck(const GradcheckConfig& cfg);

}  // namespace tpc
