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

#include "tpc/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tpc/objective.hpp"
#include "tpc/parallel.hpp"

namespace tpc {
namespace {

bool contains(const std::vector<MethodId>& methods, MethodId m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

bool needs_offline(const ExperimentConfig& cfg) {
  return contains(cfg.methods, MethodId::kDupgdOffline) ||
         (contains(cfg.methods, MethodId::kDupgdOnline) &&
          cfg.dupgd.online_init == OnlineInit::kPretrained);
}

bool uses_dupgd(const ExperimentConfig& cfg) {
  return contains(cfg.methods, MethodId::kDupgdOffline) ||
         contains(cfg.methods, MethodId::kDupgdOnline);
}

UnrollSetup unroll_setup(const ExperimentConfig& cfg) {
  return UnrollSetup{cfg.p_max_w, cfg.pgd.init};
}

TrainResult train_for(const ExperimentConfig& cfg) {
  TrainConfig train = cfg.dupgd.train;
  train.seed = cfg.seed;
  train.workers = cfg.workers;
  return train_offline(train, cfg.scenario, cfg.propagation, cfg.dupgd.net, unroll_setup(cfg));
}

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

const char* to_string(MethodId m) {
  switch (m) {
    case MethodId::kMaxPower:
      return "max_power";
    case MethodId::kPgd:
      return "pgd";
    case MethodId::kDupgdOnline:
      return "dupgd_online";
    case MethodId::kDupgdOffline:
      return "dupgd_offline";
  }
  return "?";
}

MethodId parse_method(const std::string& s) {
  for (MethodId m : {MethodId::kMaxPower, MethodId::kPgd, MethodId::kDupgdOnline,
                     MethodId::kDupgdOffline}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument(fmt::format("unknown method '{}'", s));
}

const char* to_string(OnlineInit v) { return v == OnlineInit::kFresh ? "fresh" : "pretrained"; }

OnlineInit parse_online_init(const std::string& s) {
  if (s == "fresh") return OnlineInit::kFresh;
  if (s == "pretrained") return OnlineInit::kPretrained;
  throw std::invalid_argument(fmt::format("unknown online init '{}'", s));
}

void ExperimentConfig::validate() const {
  scenario.validate();
  propagation.validate();
  pgd.validate();
  if (n_realizations == 0) throw std::invalid_argument("n_realizations must be >= 1");
  if (!(p_max_w > 0.0) || !std::isfinite(p_max_w)) {
    throw std::invalid_argument("p_max_w must be positive and finite");
  }
  if (methods.empty()) throw std::invalid_argument("methods must not be empty");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (methods[i] == methods[j]) {
        throw std::invalid_argument(fmt::format("method {} listed twice", to_string(methods[i])));
      }
    }
  }
  if (uses_dupgd(*this)) {
    dupgd.net.validate();
    dupgd.train.validate();
    if (pgd.init.rule == InitRule::kUniformRandom) {
      throw std::invalid_argument("dupgd methods need a deterministic initial power rule");
    }
  }
}

const MethodSamples& ExperimentReport::samples(MethodId m) const {
  for (const MethodSamples& s : methods) {
    if (s.method == m) return s;
  }
  throw std::invalid_argument(fmt::format("method {} not in report", to_string(m)));
}

bool ExperimentReport::has(MethodId m) const {
  return std::any_of(methods.begin(), methods.end(),
                     [m](const MethodSamples& s) { return s.method == m; });
}

MethodSummary ExperimentReport::summary(MethodId m) const {
  const MethodSamples& s = samples(m);
  MethodSummary out;
  out.method = m;
  out.mean_sum_rate = mean(s.sum_rate);
  out.mean_link_rate = mean(s.link_rate);
  out.mean_power_w = mean(s.power_w);
  out.mean_power_dbw = to_dbw(out.mean_power_w);
  return out;
}

ChannelMatrix realization_channel(const ExperimentConfig& cfg, std::size_t r) {
  Rng rng = make_rng(cfg.seed, Stream::kRealization, r);
  const Deployment dep = generate_deployment(cfg.scenario, rng);
  return sample_channel(dep, cfg.propagation, rng);
}

PowerVector allocate(MethodId method, const ExperimentConfig& cfg, const ChannelMatrix& h,
                     const UnfoldedParams* offline, std::size_t realization) {
  const std::size_t n = h.size();
  switch (method) {
    case MethodId::kMaxPower:
      return PowerVector::full(n, cfg.p_max_w);
    case MethodId::kPgd: {
      Rng rng = make_rng(cfg.seed, Stream::kInit, realization);
      return run_pgd(h, cfg.pgd, cfg.p_max_w, rng).p_final;
    }
    case MethodId::kDupgdOffline:
      if (offline == nullptr) throw std::logic_error("dupgd_offline needs trained parameters");
      return dupgd_forward(*offline, h, unroll_setup(cfg).start(n)).p_out;
    case MethodId::kDupgdOnline: {
      TrainConfig train = cfg.dupgd.train;
      train.workers = 1;
      if (cfg.dupgd.online_init == OnlineInit::kPretrained) {
        if (offline == nullptr) throw std::logic_error("pretrained online init needs parameters");
        return train_online(*offline, h, train, unroll_setup(cfg)).allocation;
      }
      Rng rng = make_rng(cfg.seed, Stream::kOnlineTraining, realization);
      const UnfoldedParams fresh = init_params(cfg.dupgd.net, train.init_step_size, n, rng);
      return train_online(fresh, h, train, unroll_setup(cfg)).allocation;
    }
  }
  throw std::logic_error("unhandled method");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;

  std::optional<TrainResult> trained;
  if (needs_offline(cfg)) trained = train_for(cfg);
  const UnfoldedParams* offline = trained ? &trained->params : nullptr;

  const std::size_t n_real = cfg.n_realizations;
  const std::size_t n_methods = cfg.methods.size();
  std::vector<std::vector<std::vector<double>>> powers(n_real);
  std::vector<std::vector<std::vector<double>>> rates(n_real);
  report.channel_hashes.resize(n_real);

  parallel_for(n_real, cfg.workers, [&](std::size_t r) {
    const ChannelMatrix h = realization_channel(cfg, r);
    report.channel_hashes[r] = h.hash();
    powers[r].resize(n_methods);
    rates[r].resize(n_methods);
    for (std::size_t m = 0; m < n_methods; ++m) {
      const PowerVector p = allocate(cfg.methods[m], cfg, h, offline, r);
      powers[r][m].assign(p.values().begin(), p.values().end());
      rates[r][m] = link_rates(p.values(), h);
    }
  });

  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodSamples s;
    s.method = cfg.methods[m];
    s.sum_rate.reserve(n_real);
    for (std::size_t r = 0; r < n_real; ++r) {
      double total = 0.0;
      for (double v : rates[r][m]) total += v;
      s.sum_rate.push_back(total);
      s.link_rate.insert(s.link_rate.end(), rates[r][m].begin(), rates[r][m].end());
      s.power_w.insert(s.power_w.end(), powers[r][m].begin(), powers[r][m].end());
    }
    report.methods.push_back(std::move(s));
  }
  if (trained) report.offline_losses = std::move(trained->history.losses);
  return report;
}

std::vector<IterationPoint> rate_vs_iterations(const ExperimentConfig& cfg,
                                               std::span<const std::size_t> grid,
                                               std::size_t max_unfolded_layers) {
  cfg.validate();
  if (grid.empty()) throw std::invalid_argument("iteration grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0) throw std::invalid_argument("iteration grid entries must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("iteration grid must be strictly ascending");
    }
  }

  const std::size_t n_real = cfg.n_realizations;
  const double n_links = static_cast<double>(cfg.scenario.n_links);
  std::vector<ChannelMatrix> channels(n_real);
  parallel_for(n_real, cfg.workers, [&](std::size_t r) { channels[r] = realization_channel(cfg, r); });

  std::vector<IterationPoint> out;
  auto mean_link_rate = [&](const std::vector<double>& sum_rates) {
    return mean(sum_rates) / n_links;
  };

  for (MethodId method : cfg.methods) {
    if (method == MethodId::kMaxPower) {
      std::vector<double> s(n_real);
      for (std::size_t r = 0; r < n_real; ++r) {
        s[r] = sum_rate(PowerVector::full(channels[r].size(), cfg.p_max_w).values(), channels[r]);
      }
      for (std::size_t k : grid) out.push_back({method, k, mean_link_rate(s)});
    } else if (method == MethodId::kPgd) {
      PgdConfig pgd = cfg.pgd;
      pgd.max_iters = grid.back();
      pgd.record_trajectory = true;
      pgd.early_stop_tol = 0.0;
      std::vector<std::vector<double>> traj(n_real);
      parallel_for(n_real, cfg.workers, [&](std::size_t r) {
        Rng rng = make_rng(cfg.seed, Stream::kInit, r);
        traj[r] = run_pgd(channels[r], pgd, cfg.p_max_w, rng).trajectory;
      });
      for (std::size_t k : grid) {
        std::vector<double> s(n_real);
        for (std::size_t r = 0; r < n_real; ++r) s[r] = traj[r][k - 1];
        out.push_back({method, k, mean_link_rate(s)});
      }
    } else {
      for (std::size_t k : grid) {
        if (k > max_unfolded_layers) break;
        ExperimentConfig at_k = cfg;
        at_k.dupgd.net.n_layers = k;
        std::optional<TrainResult> trained;
        if (needs_offline(at_k)) trained = train_for(at_k);
        const UnfoldedParams* offline = trained ? &trained->params : nullptr;
        std::vector<double> s(n_real);
        parallel_for(n_real, cfg.workers, [&](std::size_t r) {
          s[r] = sum_rate(allocate(method, at_k, channels[r], offline, r).values(), channels[r]);
        });
        out.push_back({method, k, mean_link_rate(s)});
      }
    }
  }
  return out;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_cdf needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw std::invalid_argument("empirical_cdf sample is NaN");
  }
  std::stable_sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CdfPoint> out(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    out[k] = {sorted[k], static_cast<double>(k + 1) / n};
  }
  return out;
}

std::vector<MethodValue> mean_rate_increase(const ExperimentReport& report) {
  if (!report.has(MethodId::kMaxPower)) {
    throw std::invalid_argument("mean_rate_increase needs the max_power baseline");
  }
  const double base = mean(report.samples(MethodId::kMaxPower).sum_rate);
  std::vector<MethodValue> out;
  for (const MethodSamples& s : report.methods) out.push_back({s.method, mean(s.sum_rate) - base});
  return out;
}

std::optional<double> to_dbw(double watts) {
  if (watts <= 0.0) return std::nullopt;
  return 10.0 * std::log10(watts);
}

std::vector<PowerDistribution> power_distribution(const ExperimentReport& report) {
  std::vector<PowerDistribution> out;
  for (const MethodSamples& s : report.methods) {
    PowerDistribution d;
    d.method = s.method;
    d.cdf_w = empirical_cdf(s.power_w);
    d.mean_w = mean(s.power_w);
    d.mean_dbw = to_dbw(d.mean_w);
    out.push_back(std::move(d));
  }
  return out;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kNLinks:
      return "n_links";
    case SweepAxis::kPathlossExponent:
      return "pathloss_exponent";
    case SweepAxis::kShadowingStd:
      return "shadowing_std";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::kNLinks, SweepAxis::kPathlossExponent, SweepAxis::kShadowingStd}) {
    if (s == to_string(a)) return a;
  }
  throw std::invalid_argument(fmt::format("unknown sweep axis '{}'", s));
}

std::vector<SweepRow> sensitivity_sweep(const ExperimentConfig& base, SweepAxis axis,
                                        std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sweep values must not be empty");
  std::vector<ExperimentConfig> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    ExperimentConfig cfg = base;
    cfg.seed = base.seed + i;
    switch (axis) {
      case SweepAxis::kNLinks:
        if (!(v >= 1.0) || v != std::floor(v)) {
          throw std::invalid_argument(fmt::format("n_links sweep value {} is not a positive integer", v));
        }
        cfg.scenario.n_links = static_cast<std::size_t>(v);
        break;
      case SweepAxis::kPathlossExponent:
        cfg.propagation.pathloss_exponent = v;
        break;
      case SweepAxis::kShadowingStd:
        cfg.propagation.shadowing_std_db = v;
        break;
    }
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("{} = {}: {}", to_string(axis), v, e.what()));
    }
    points.push_back(std::move(cfg));
  }

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ExperimentReport report = run_experiment(points[i]);
    for (const MethodSamples& s : report.methods) {
      rows.push_back({axis, values[i], points[i].seed, s.method, mean(s.link_rate)});
    }
  }
  return rows;
}

}  // namespace tpc
