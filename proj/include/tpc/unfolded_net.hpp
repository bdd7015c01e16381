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

// Deep-unfolded projected gradient descent.
//
// Layer k maps the current allocation p to
//
//   scalar_step:  p <- clamp(p - (delta1[k] * Psi(p) + delta2[k] * Phi(p)))
//   mlp_layer:    p <- clamp(p_max * MLP_k([p / p_max, log1p(p_max Psi), log1p(p_max Phi)]))
//
// delta1 in [-1, 0] and delta2 in [0, 1] are learned replacements for -step
// and +step, so delta = (-step, +step) in every layer reproduces iterative
// PGD with that step size. Training is unsupervised: the loss is the
// negative sum rate of the network output averaged over a batch of
// channels, differentiated in reverse mode through every layer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tpc/channel_model.hpp"
#include "tpc/objective.hpp"
#include "tpc/pgd.hpp"
#include "tpc/random.hpp"

namespace tpc {

enum class Variant { kScalarStep, kMlpLayer };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Dense 3N -> hidden -> hidden -> N network of one mlp layer, row-major.
struct MlpWeights {
  std::size_t n_links = 0;
  std::size_t hidden = 0;
  std::vector<double> w1, b1;  // hidden x 3N, hidden
  std::vector<double> w2, b2;  // hidden x hidden, hidden
  std::vector<double> w3, b3;  // N x hidden, N

  std::size_t parameter_count() const;

  friend bool operator==(const MlpWeights&, const MlpWeights&) = default;
};

struct UnfoldedParams {
  Variant variant = Variant::kScalarStep;
  std::vector<double> delta1;
  std::vector<double> delta2;
  std::vector<MlpWeights> mlp;  // one per layer iff variant == kMlpLayer

  std::size_t n_layers() const { return delta1.size(); }

  /// Throws std::invalid_argument when shapes or delta ranges are broken.
  void validate() const;

  /// Trainable parameters as one flat vector: [delta1, delta2] for
  /// scalar_step, the concatenated layer weights for mlp_layer.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);
  std::size_t trainable_count() const;

  /// Positions of layer k's parameters inside the flat vector.
  std::vector<std::size_t> layer_indices(std::size_t k) const;

  /// Projects the deltas back onto their ranges.
  void clamp_deltas();

  friend bool operator==(const UnfoldedParams&, const UnfoldedParams&) = default;
};

struct NetConfig {
  std::size_t n_layers = 40;
  Variant variant = Variant::kScalarStep;
  std::size_t hidden_width = 64;

  void validate() const;
};

/// scalar_step: every delta1 = -init_step_size, delta2 = +init_step_size.
/// mlp_layer: weights and biases uniform in +-1/sqrt(fan_in) (deltas set as
/// for scalar_step but unused).
UnfoldedParams init_params(const NetConfig& net, double init_step_size, std::size_t n_links,
                           Rng& rng);

/// Start point and box used by every unrolled evaluation. Only deterministic
/// init rules are accepted.
struct UnrollSetup {
  double p_max_w = 10.0;
  PowerInit p0;

  PowerVector start(std::size_t n) const;
};

struct LayerCache {
  std::vector<double> p_in;
  GradDecomposition grad;
  std::vector<double> z;  // pre-projection output
  // mlp_layer only
  std::vector<double> x, a1, h1, a2, h2;
};

struct ForwardResult {
  PowerVector p_out;
  std::vector<LayerCache> cache;
};

/// Runs the first `active_layers` layers (all when omitted).
ForwardResult dupgd_forward(const UnfoldedParams& params, const ChannelMatrix& h,
                            const PowerVector& p0);
ForwardResult dupgd_forward(const UnfoldedParams& params, const ChannelMatrix& h,
                            const PowerVector& p0, std::size_t active_layers);

/// -(1/B) sum_b sum_rate(forward(H_b)).
double loss(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
            const UnrollSetup& setup);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as UnfoldedParams::flatten()
};

/// Exact reverse-mode gradient of `loss`. The projection passes gradient on
/// the closed interval [0, p_max] and blocks it outside. Batch elements are
/// processed by up to `workers` threads and reduced in index order.
LossGrad backward(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
                  const UnrollSetup& setup, std::size_t workers = 1);
LossGrad backward(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
                  const UnrollSetup& setup, std::size_t active_layers, std::size_t workers);

enum class OnlineSchedule { kWholeUnroll, kLayerwise };

struct TrainConfig {
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t n_batches = 2000;
  std::size_t online_steps = 20;
  double init_step_size = 0.1;
  OnlineSchedule online_schedule = OnlineSchedule::kWholeUnroll;
  bool record_snapshots = false;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  static AdamState zeros(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
  }
};

/// Bias-corrected Adam on the flat trainable vector, then delta clamping.
void adam_step(UnfoldedParams& params, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg);

struct TrainHistory {
  std::vector<double> losses;
  std::vector<std::vector<double>> snapshots;  // flat params after each step, when recorded
  double wall_clock_s = 0.0;
  TrainConfig config;  // echo, hyperparameters included
};

struct TrainResult {
  UnfoldedParams params;
  TrainHistory history;
};

/// Offline training over cfg.n_batches batches with a fresh deployment per
/// channel. Deterministic given cfg.seed, independent of cfg.workers.
TrainResult train_offline(const TrainConfig& cfg, const ScenarioSpec& scenario,
                          const PropagationParams& propagation, const NetConfig& net,
                          const UnrollSetup& setup);

struct OnlineResult {
  UnfoldedParams params;
  PowerVector allocation;
  std::vector<double> losses;
};

/// Adapts `params` to one channel realization (batch of one) and returns the
/// adapted parameters with the allocation they produce.
OnlineResult train_online(const UnfoldedParams& params, const ChannelMatrix& h,
                          const TrainConfig& cfg, const UnrollSetup& setup);

}  // namespace tpc
