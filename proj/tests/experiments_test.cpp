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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"

namespace tpc {
namespace {

ExperimentConfig small_config(std::size_t n_links, std::size_t n_real) {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioSpec::scen1(n_links);
  cfg.n_realizations = n_real;
  cfg.seed = 11;
  cfg.pgd.max_iters = 50;
  cfg.dupgd.net.n_layers = 3;
  cfg.dupgd.train.n_batches = 5;
  cfg.dupgd.train.batch_size = 4;
  cfg.dupgd.train.online_steps = 2;
  return cfg;
}

TEST(MethodId, ParseRoundTrip) {
  for (MethodId m : {MethodId::kMaxPower, MethodId::kPgd, MethodId::kDupgdOnline,
                     MethodId::kDupgdOffline}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("wmmse"), std::invalid_argument);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg = small_config(3, 2);
  cfg.n_realizations = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config(3, 2);
  cfg.methods = {MethodId::kPgd, MethodId::kPgd};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config(3, 2);
  cfg.pgd.init.rule = InitRule::kUniformRandom;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.methods = {MethodId::kPgd};
  EXPECT_NO_THROW(cfg.validate());
}

TEST(RunExperiment, MaxPowerSingleLinkClosedForm) {
  ExperimentConfig cfg = small_config(1, 25);
  cfg.methods = {MethodId::kMaxPower};
  const ExperimentReport report = run_experiment(cfg);
  const std::vector<double>& s = report.samples(MethodId::kMaxPower).sum_rate;
  ASSERT_EQ(s.size(), 25u);
  for (std::size_t r = 0; r < s.size(); ++r) {
    const ChannelMatrix h = realization_channel(cfg, r);
    const double expected = std::log2(1.0 + 10.0 * h(0, 0) / h.noise_power());
    EXPECT_NEAR(s[r], expected, 1e-12 * expected);
  }
}

TEST(RunExperiment, ShapesBoundsAndPairing) {
  const ExperimentConfig cfg = small_config(4, 6);
  const ExperimentReport report = run_experiment(cfg);
  ASSERT_EQ(report.methods.size(), 4u);
  for (const MethodSamples& s : report.methods) {
    EXPECT_EQ(s.sum_rate.size(), 6u);
    EXPECT_EQ(s.link_rate.size(), 24u);
    EXPECT_EQ(s.power_w.size(), 24u);
    for (double p : s.power_w) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 10.0);
    }
    for (std::size_t r = 0; r < 6; ++r) {
      double total = 0.0;
      for (std::size_t n = 0; n < 4; ++n) total += s.link_rate[r * 4 + n];
      EXPECT_DOUBLE_EQ(s.sum_rate[r], total);
    }
  }
  ASSERT_EQ(report.channel_hashes.size(), 6u);
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(report.channel_hashes[r], realization_channel(cfg, r).hash());
  }
  EXPECT_EQ(report.offline_losses.size(), 5u);
}

TEST(RunExperiment, AllocationsReproduceRecordedRates) {
  const ExperimentConfig cfg = small_config(3, 4);
  const ExperimentReport report = run_experiment(cfg);
  for (const MethodSamples& s : report.methods) {
    for (std::size_t r = 0; r < 4; ++r) {
      const ChannelMatrix h = realization_channel(cfg, r);
      const std::vector<double> p(s.power_w.begin() + r * 3, s.power_w.begin() + r * 3 + 3);
      EXPECT_NEAR(s.sum_rate[r], static_cast<double>(testing::oracle_sum_rate(p, h)), 1e-12);
    }
  }
}

TEST(RunExperiment, DeterministicAndWorkerIndependent) {
  ExperimentConfig cfg = small_config(3, 8);
  const ExperimentReport a = run_experiment(cfg);
  cfg.workers = 3;
  const ExperimentReport b = run_experiment(cfg);
  ASSERT_EQ(a.methods.size(), b.methods.size());
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    EXPECT_EQ(a.methods[m].sum_rate, b.methods[m].sum_rate);
    EXPECT_EQ(a.methods[m].power_w, b.methods[m].power_w);
  }
  EXPECT_EQ(a.channel_hashes, b.channel_hashes);
}

TEST(RunExperiment, PgdNotWorseThanMaxPower) {
  ExperimentConfig cfg = small_config(5, 40);
  cfg.methods = {MethodId::kMaxPower, MethodId::kPgd};
  cfg.pgd.max_iters = 1000;
  const ExperimentReport report = run_experiment(cfg);
  EXPECT_GE(report.summary(MethodId::kPgd).mean_sum_rate,
            report.summary(MethodId::kMaxPower).mean_sum_rate - 1e-6);
}

TEST(RunExperiment, PretrainedOnlineStart) {
  ExperimentConfig cfg = small_config(3, 3);
  cfg.methods = {MethodId::kDupgdOnline};
  cfg.dupgd.online_init = OnlineInit::kPretrained;
  const ExperimentReport report = run_experiment(cfg);
  EXPECT_EQ(report.offline_losses.size(), 5u);
  cfg.dupgd.train.online_steps = 0;
  cfg.methods = {MethodId::kDupgdOnline, MethodId::kDupgdOffline};
  const ExperimentReport frozen = run_experiment(cfg);
  EXPECT_EQ(frozen.samples(MethodId::kDupgdOnline).power_w,
            frozen.samples(MethodId::kDupgdOffline).power_w);
}

TEST(MeanRateIncrease, BaselineIsZeroAndRequired) {
  ExperimentConfig cfg = small_config(3, 5);
  cfg.methods = {MethodId::kPgd, MethodId::kMaxPower};
  const ExperimentReport report = run_experiment(cfg);
  const std::vector<MethodValue> inc = mean_rate_increase(report);
  ASSERT_EQ(inc.size(), 2u);
  EXPECT_EQ(inc[1].method, MethodId::kMaxPower);
  EXPECT_EQ(inc[1].value, 0.0);

  cfg.methods = {MethodId::kPgd};
  EXPECT_THROW(mean_rate_increase(run_experiment(cfg)), std::invalid_argument);
}

TEST(MeanRateIncrease, IdenticalAllocationsGiveEqualDeltas) {
  // A single link is optimal at full power, so PGD never leaves max power.
  ExperimentConfig cfg = small_config(1, 10);
  cfg.methods = {MethodId::kMaxPower, MethodId::kPgd};
  const ExperimentReport report = run_experiment(cfg);
  EXPECT_EQ(report.samples(MethodId::kPgd).power_w, report.samples(MethodId::kMaxPower).power_w);
  const std::vector<MethodValue> inc = mean_rate_increase(report);
  EXPECT_EQ(inc[0].value, inc[1].value);
}

TEST(EmpiricalCdf, SingleSample) {
  const std::vector<double> xs{5.0};
  const std::vector<CdfPoint> cdf = empirical_cdf(xs);
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].value, 5.0);
  EXPECT_EQ(cdf[0].probability, 1.0);
}

TEST(EmpiricalCdf, QuarterSteps) {
  const std::vector<double> xs{3.0, 1.0, 4.0, 2.0};
  const std::vector<CdfPoint> cdf = empirical_cdf(xs);
  const double expected[] = {0.25, 0.5, 0.75, 1.0};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(cdf[k].value, static_cast<double>(k + 1));
    EXPECT_EQ(cdf[k].probability, expected[k]);
  }
}

TEST(EmpiricalCdf, StandardNormalMedian) {
  Rng rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> xs(10000);
  for (double& x : xs) x = normal(rng);
  const std::vector<CdfPoint> cdf = empirical_cdf(xs);
  double at_zero = 0.0;
  for (const CdfPoint& pt : cdf) {
    if (pt.value <= 0.0) at_zero = pt.probability;
  }
  EXPECT_NEAR(at_zero, 0.5, 0.02);
  for (std::size_t k = 1; k < cdf.size(); ++k) {
    EXPECT_LE(cdf[k - 1].value, cdf[k].value);
    EXPECT_LT(cdf[k - 1].probability, cdf[k].probability);
  }
}

TEST(EmpiricalCdf, EmptyRejected) {
  EXPECT_THROW(empirical_cdf(std::vector<double>{}), std::invalid_argument);
}

TEST(PowerDistribution, MaxPowerIsPointMassAtTenDbw) {
  ExperimentConfig cfg = small_config(3, 4);
  cfg.methods = {MethodId::kMaxPower};
  const std::vector<PowerDistribution> d = power_distribution(run_experiment(cfg));
  ASSERT_EQ(d.size(), 1u);
  for (const CdfPoint& pt : d[0].cdf_w) EXPECT_EQ(pt.value, 10.0);
  ASSERT_TRUE(d[0].mean_dbw.has_value());
  EXPECT_DOUBLE_EQ(*d[0].mean_dbw, 10.0);
}

TEST(PowerDistribution, ZeroAllocationHasNoDbwMean) {
  ExperimentReport report;
  report.methods.push_back({MethodId::kPgd, {0.0}, {0.0, 0.0}, {0.0, 0.0}});
  const std::vector<PowerDistribution> d = power_distribution(report);
  EXPECT_EQ(d[0].mean_w, 0.0);
  EXPECT_FALSE(d[0].mean_dbw.has_value());
  EXPECT_FALSE(report.summary(MethodId::kPgd).mean_power_dbw.has_value());
}

TEST(RateVsIterations, GridPreconditions) {
  const ExperimentConfig cfg = small_config(3, 2);
  EXPECT_THROW(rate_vs_iterations(cfg, std::vector<std::size_t>{0}, 10), std::invalid_argument);
  EXPECT_THROW(rate_vs_iterations(cfg, std::vector<std::size_t>{5, 2}, 10), std::invalid_argument);
  EXPECT_THROW(rate_vs_iterations(cfg, std::vector<std::size_t>{}, 10), std::invalid_argument);
}

TEST(RateVsIterations, OneIterationMatchesHandStep) {
  ExperimentConfig cfg = small_config(4, 6);
  cfg.methods = {MethodId::kPgd};
  const auto points = rate_vs_iterations(cfg, std::vector<std::size_t>{1}, 10);
  ASSERT_EQ(points.size(), 1u);

  double total = 0.0;
  for (std::size_t r = 0; r < 6; ++r) {
    const ChannelMatrix h = realization_channel(cfg, r);
    std::vector<double> p(4, 10.0);
    const std::vector<double> g = grad_rho(p, h);
    for (std::size_t n = 0; n < 4; ++n) p[n] = std::clamp(10.0 - 0.1 * g[n], 0.0, 10.0);
    total += static_cast<double>(testing::oracle_sum_rate(p, h));
  }
  EXPECT_NEAR(points[0].mean_link_rate, total / 24.0, 1e-10);
}

TEST(RateVsIterations, UntrainedNetworkTracksPgdCurve) {
  ExperimentConfig cfg = small_config(3, 5);
  cfg.methods = {MethodId::kPgd, MethodId::kDupgdOffline};
  cfg.dupgd.train.n_batches = 0;
  const std::vector<std::size_t> grid{1, 3, 8};
  const auto points = rate_vs_iterations(cfg, grid, 3);
  ASSERT_EQ(points.size(), 5u);  // DUPGD at K = 8 skipped
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(points[i].method, MethodId::kPgd);
    EXPECT_EQ(points[3 + i].method, MethodId::kDupgdOffline);
    EXPECT_EQ(points[3 + i].iterations, grid[i]);
    EXPECT_EQ(points[3 + i].mean_link_rate, points[i].mean_link_rate);
  }
}

TEST(SensitivitySweep, MaxPowerRateFallsWithLinkCount) {
  ExperimentConfig cfg = small_config(2, 200);
  cfg.methods = {MethodId::kMaxPower};
  const std::vector<double> values{5, 10, 20};
  const std::vector<SweepRow> rows = sensitivity_sweep(cfg, SweepAxis::kNLinks, values);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GE(rows[0].mean_link_rate, rows[1].mean_link_rate);
  EXPECT_GE(rows[1].mean_link_rate, rows[2].mean_link_rate);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rows[i].seed, cfg.seed + i);
}

TEST(SensitivitySweep, SingleValueEqualsRunExperiment) {
  ExperimentConfig cfg = small_config(3, 6);
  const std::vector<double> values{3.0};
  const std::vector<SweepRow> rows = sensitivity_sweep(cfg, SweepAxis::kPathlossExponent, values);
  cfg.propagation.pathloss_exponent = 3.0;
  const ExperimentReport report = run_experiment(cfg);
  ASSERT_EQ(rows.size(), report.methods.size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    EXPECT_EQ(rows[m].method, report.methods[m].method);
    EXPECT_EQ(rows[m].mean_link_rate, report.summary(rows[m].method).mean_link_rate);
  }
}

TEST(SensitivitySweep, InvalidValuesRejected) {
  const ExperimentConfig cfg = small_config(3, 2);
  EXPECT_THROW(sensitivity_sweep(cfg, SweepAxis::kPathlossExponent, std::vector<double>{0.0}),
               std::invalid_argument);
  EXPECT_THROW(sensitivity_sweep(cfg, SweepAxis::kNLinks, std::vector<double>{2.5}),
               std::invalid_argument);
  EXPECT_THROW(sensitivity_sweep(cfg, SweepAxis::kShadowingStd, std::vector<double>{-1.0}),
               std::invalid_argument);
  EXPECT_THROW(sensitivity_sweep(cfg, SweepAxis::kNLinks, std::vector<double>{}),
               std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("bandwidth"), std::invalid_argument);
}

}  // namespace
}  // namespace tpc
