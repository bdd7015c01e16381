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

// Monte-Carlo evaluation of power control methods on paired channel
// realizations.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpc/channel_model.hpp"
#include "tpc/pgd.hpp"
#include "tpc/unfolded_net.hpp"

namespace tpc {

enum class MethodId { kMaxPower, kPgd, kDupgdOnline, kDupgdOffline };

const char* to_string(MethodId m);
MethodId parse_method(const std::string& s);

enum class OnlineInit { kFresh, kPretrained };

const char* to_string(OnlineInit v);
OnlineInit parse_online_init(const std::string& s);

struct DupgdConfig {
  NetConfig net;
  TrainConfig train;
  OnlineInit online_init = OnlineInit::kFresh;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  PropagationParams propagation;
  std::vector<MethodId> methods{MethodId::kMaxPower, MethodId::kPgd, MethodId::kDupgdOnline,
                                MethodId::kDupgdOffline};
  std::size_t n_realizations = 500;
  PgdConfig pgd;
  DupgdConfig dupgd;
  double p_max_w = 10.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  void validate() const;
};

struct MethodSamples {
  MethodId method = MethodId::kMaxPower;
  std::vector<double> sum_rate;   // one per realization
  std::vector<double> link_rate;  // realization-major, N per realization
  std::vector<double> power_w;    // same layout as link_rate
};

struct MethodSummary {
  MethodId method = MethodId::kMaxPower;
  double mean_sum_rate = 0.0;
  double mean_link_rate = 0.0;
  double mean_power_w = 0.0;
  /// Empty when every allocated power is zero.
  std::optional<double> mean_power_dbw;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MethodSamples> methods;
  std::vector<std::uint64_t> channel_hashes;  // one per realization
  /// Offline training loss per batch, when dupgd_offline was trained.
  std::vector<double> offline_losses;

  const MethodSamples& samples(MethodId m) const;
  bool has(MethodId m) const;
  MethodSummary summary(MethodId m) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Per-link allocation of one method on one channel. `offline` must hold the
/// pretrained parameters when the method needs them.
PowerVector allocate(MethodId method, const ExperimentConfig& cfg, const ChannelMatrix& h,
                     const UnfoldedParams* offline, std::size_t realization);

/// The channel of realization r, exactly as run_experiment draws it.
ChannelMatrix realization_channel(const ExperimentConfig& cfg, std::size_t r);

struct IterationPoint {
  MethodId method = MethodId::kPgd;
  std::size_t iterations = 0;
  double mean_link_rate = 0.0;
};

/// PGD truncated at every grid point and DUPGD with K = grid point (trained
/// once per K), averaged over the configured realizations. DUPGD points above
/// `max_unfolded_layers` are skipped. The grid must be strictly ascending and
/// start at 1 or above.
std::vector<IterationPoint> rate_vs_iterations(const ExperimentConfig& cfg,
                                               std::span<const std::size_t> grid,
                                               std::size_t max_unfolded_layers);

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;
};

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples);

struct MethodValue {
  MethodId method = MethodId::kMaxPower;
  double value = 0.0;
};

/// mean(method sum rate) - mean(max_power sum rate) for every method.
std::vector<MethodValue> mean_rate_increase(const ExperimentReport& report);

struct PowerDistribution {
  MethodId method = MethodId::kMaxPower;
  std::vector<CdfPoint> cdf_w;
  double mean_w = 0.0;
  std::optional<double> mean_dbw;
};

std::vector<PowerDistribution> power_distribution(const ExperimentReport& report);

/// 10 log10(watts), empty for zero.
std::optional<double> to_dbw(double watts);

enum class SweepAxis { kNLinks, kPathlossExponent, kShadowingStd };

const char* to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

struct SweepRow {
  SweepAxis axis = SweepAxis::kNLinks;
  double value = 0.0;
  std::uint64_t seed = 0;
  MethodId method = MethodId::kMaxPower;
  double mean_link_rate = 0.0;
};

/// Point i runs run_experiment with the axis set to values[i] and seed
/// base.seed + i. Offline DUPGD is retrained at every point.
std::vector<SweepRow> sensitivity_sweep(const ExperimentConfig& base, SweepAxis axis,
                                        std::span<const double> values);

}  // namespace tpc
