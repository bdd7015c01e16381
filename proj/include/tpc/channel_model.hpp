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

// Random D2D deployments and instantaneous channel gain matrices.
//
// Gains follow a distance-dependent pathloss with a unit-gain cap inside one
// metre, Rayleigh small-scale fading and lognormal shadowing:
//
//   gain(i -> j) = |g_ij|^2 * c^2 min(1, d_ij^-w) / (16 pi^2 fc^2) * 10^(X_ij/10)
//
// with g_ij complex Gaussian of unit mean power and X_ij ~ N(0, sigma_dB^2).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tpc/random.hpp"

namespace tpc {

inline constexpr double kSpeedOfLight = 299792458.0;

struct PropagationParams {
  double carrier_freq_hz = 6e9;
  double pathloss_exponent = 2.0;
  double shadowing_std_db = 5.0;
  double noise_power_w = 2e-10;
  double bandwidth_hz = 5e6;  // metadata only

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct ScenarioSpec {
  double area_x_m = 20.0;
  double area_y_m = 20.0;
  std::size_t n_links = 20;
  /// Absent: transmitter and receiver placed independently (scenario 1).
  std::optional<double> max_pair_distance_m;

  void validate() const;

  static ScenarioSpec scen1(std::size_t n_links);
  static ScenarioSpec scen2(std::size_t n_links, double d_max_m = 3.0);
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Deployment {
  std::vector<Point> tx;
  std::vector<Point> rx;
  ScenarioSpec scenario;

  std::size_t size() const { return tx.size(); }
};

/// Thrown when rejection sampling of a receiver exhausts its draw budget.
class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N x N power gains, entry (i, j) is transmitter i -> receiver j.
/// Row-major storage.
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(std::size_t n, std::vector<double> gains, double noise_power_w);

  std::size_t size() const { return n_; }
  double noise_power() const { return noise_power_w_; }

  double operator()(std::size_t tx, std::size_t rx) const { return gains_[tx * n_ + rx]; }
  double direct(std::size_t link) const { return gains_[link * n_ + link]; }

  std::span<const double> gains() const { return gains_; }

  /// FNV-1a over the raw bytes of the gains and noise power.
  std::uint64_t hash() const;

  friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> gains_;
  double noise_power_w_ = 0.0;
};

/// Test and comparison switches for sample_channel.
struct ChannelOptions {
  bool fading = true;
  bool shadowing = true;
  /// Store the amplitude-like square root of the power gain instead of the
  /// power gain itself.
  bool literal_amplitude = false;
};

inline constexpr std::size_t kMaxRejectionDraws = 1'000'000;

Deployment generate_deployment(const ScenarioSpec& spec, Rng& rng);

/// Deterministic pathloss power gain at distance d (m).
double pathloss_power_gain(double d_m, const PropagationParams& params);

ChannelMatrix sample_channel(const Deployment& dep, const PropagationParams& params, Rng& rng,
                             const ChannelOptions& options = {});

/// Where the deployments of a batch come from: one fixed deployment with
/// fading and shadowing redrawn per element, or a fresh deployment per element.
using DeploymentSource = std::variant<Deployment, ScenarioSpec>;

std::vector<ChannelMatrix> sample_batch(const DeploymentSource& source,
                                        const PropagationParams& params, std::size_t n_batch,
                                        Rng& rng, const ChannelOptions& options = {});

}  // namespace tpc
