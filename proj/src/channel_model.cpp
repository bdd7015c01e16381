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

#include "tpc/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

namespace tpc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void PropagationParams::validate() const {
  require(carrier_freq_hz > 0.0, "propagation.carrier_freq_hz must be > 0");
  require(pathloss_exponent > 0.0, "propagation.pathloss_exponent must be > 0");
  require(shadowing_std_db >= 0.0, "propagation.shadowing_std_db must be >= 0");
  require(noise_power_w > 0.0, "propagation.noise_power_w must be > 0");
  require(bandwidth_hz > 0.0, "propagation.bandwidth_hz must be > 0");
}

void ScenarioSpec::validate() const {
  require(area_x_m > 0.0 && area_y_m > 0.0, "scenario.area must be positive");
  require(n_links >= 1, "scenario.n_links must be >= 1");
  if (max_pair_distance_m) {
    require(*max_pair_distance_m >= 0.0, "scenario.max_pair_distance_m must be >= 0");
    require(*max_pair_distance_m <= std::min(area_x_m, area_y_m),
            "scenario.max_pair_distance_m must not exceed the area dimensions");
  }
}

ScenarioSpec ScenarioSpec::scen1(std::size_t n_links) {
  ScenarioSpec s;
  s.n_links = n_links;
  return s;
}

ScenarioSpec ScenarioSpec::scen2(std::size_t n_links, double d_max_m) {
  ScenarioSpec s;
  s.n_links = n_links;
  s.max_pair_distance_m = d_max_m;
  return s;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

ChannelMatrix::ChannelMatrix(std::size_t n, std::vector<double> gains, double noise_power_w)
    : n_(n), gains_(std::move(gains)), noise_power_w_(noise_power_w) {
  if (n_ == 0) throw std::invalid_argument("channel matrix must have at least one link");
  if (gains_.size() != n_ * n_) {
    throw std::invalid_argument("channel matrix: expected " + std::to_string(n_ * n_) +
                                " gains, got " + std::to_string(gains_.size()));
  }
  if (!(noise_power_w_ > 0.0) || !std::isfinite(noise_power_w_)) {
    throw std::invalid_argument("channel matrix: noise power must be positive and finite");
  }
  for (double g : gains_) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("channel matrix: gains must be finite and nonnegative");
    }
  }
}

std::uint64_t ChannelMatrix::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(gains_.data(), gains_.size() * sizeof(double));
  mix(&noise_power_w_, sizeof(double));
  return h;
}

Deployment generate_deployment(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  std::uniform_real_distribution<double> ux(0.0, spec.area_x_m);
  std::uniform_real_distribution<double> uy(0.0, spec.area_y_m);

  Deployment dep;
  dep.scenario = spec;
  dep.tx.reserve(spec.n_links);
  dep.rx.reserve(spec.n_links);
  for (std::size_t n = 0; n < spec.n_links; ++n) {
    const Point tx{ux(rng), uy(rng)};
    Point rx{ux(rng), uy(rng)};
    if (spec.max_pair_distance_m) {
      const double d_max = *spec.max_pair_distance_m;
      if (d_max == 0.0) {
        rx = tx;
      } else {
        std::size_t draws = 1;
        while (distance(tx, rx) > d_max) {
          if (++draws > kMaxRejectionDraws) {
            throw InfeasibleScenario("receiver placement for link " + std::to_string(n) +
                                     " exceeded " + std::to_string(kMaxRejectionDraws) +
                                     " rejection draws");
          }
          rx = Point{ux(rng), uy(rng)};
        }
      }
    }
    dep.tx.push_back(tx);
    dep.rx.push_back(rx);
  }
  return dep;
}

double pathloss_power_gain(double d_m, const PropagationParams& params) {
  if (!(d_m >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  const double attenuation = std::min(1.0, std::pow(d_m, -params.pathloss_exponent));
  const double fc = params.carrier_freq_hz;
  return kSpeedOfLight * kSpeedOfLight * attenuation /
         (16.0 * std::numbers::pi * std::numbers::pi * fc * fc);
}

ChannelMatrix sample_channel(const Deployment& dep, const PropagationParams& params, Rng& rng,
                             const ChannelOptions& options) {
  params.validate();
  const std::size_t n = dep.size();
  if (n == 0 || dep.rx.size() != n) throw std::invalid_argument("invalid deployment");

  // Each complex fading component carries half the unit mean power.
  std::normal_distribution<double> quadrature(0.0, std::numbers::sqrt2 / 2.0);
  std::normal_distribution<double> shadow_db(0.0, 1.0);

  std::vector<double> gains(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double power = pathloss_power_gain(distance(dep.tx[i], dep.rx[j]), params);
      if (options.fading) {
        const double re = quadrature(rng);
        const double im = quadrature(rng);
        power *= re * re + im * im;
      }
      if (options.shadowing) {
        const double x_db = params.shadowing_std_db * shadow_db(rng);
        power *= std::pow(10.0, x_db / 10.0);
      }
      gains[i * n + j] = options.literal_amplitude ? std::sqrt(power) : power;
    }
  }
  return ChannelMatrix(n, std::move(gains), params.noise_power_w);
}

std::vector<ChannelMatrix> sample_batch(const DeploymentSource& source,
                                        const PropagationParams& params, std::size_t n_batch,
                                        Rng& rng, const ChannelOptions& options) {
  if (n_batch == 0) throw std::invalid_argument("batch size must be >= 1");
  std::vector<ChannelMatrix> batch;
  batch.reserve(n_batch);
  for (std::size_t b = 0; b < n_batch; ++b) {
    if (const auto* fixed = std::get_if<Deployment>(&source)) {
      batch.push_back(sample_channel(*fixed, params, rng, options));
    } else {
      const Deployment dep = generate_deployment(std::get<ScenarioSpec>(source), rng);
      batch.push_back(sample_channel(dep, params, rng, options));
    }
  }
  return batch;
}

}  // namespace tpc
