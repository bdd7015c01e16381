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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "tpc/objective.hpp"
#include "tpc/pgd.hpp"
#include "tpc/unfolded_net.hpp"

namespace tpc {
namespace {

constexpr std::size_t kCases = 1000;

/// Runs `property(rng, case_index)` for kCases independently seeded cases.
/// The property returns an empty string on success and a description of
/// the violation otherwise; the first violation is reported with its case.
template <typename Property>
void for_all(std::uint64_t seed, Property property) {
  std::size_t violations = 0;
  std::string first;
  for (std::size_t c = 0; c < kCases; ++c) {
    Rng rng = make_rng(seed, Stream::kTest, c);
    const std::string why = property(rng, c);
    if (!why.empty()) {
      if (violations++ == 0) first = "case " + std::to_string(c) + ": " + why;
    }
  }
  EXPECT_EQ(violations, 0u) << first;
}

std::size_t draw_links(Rng& rng, std::size_t max_links) {
  return std::uniform_int_distribution<std::size_t>(1, max_links)(rng);
}

double draw_pmax(Rng& rng) { return std::uniform_real_distribution<double>(0.1, 20.0)(rng); }

std::vector<double> draw_raw(Rng& rng, std::size_t n, double p_max) {
  std::uniform_real_distribution<double> u(-p_max, 2.0 * p_max);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

bool in_box(std::span<const double> p, double p_max) {
  return std::all_of(p.begin(), p.end(), [&](double v) { return v >= 0.0 && v <= p_max; });
}

ChannelMatrix permuted(const ChannelMatrix& h, const std::vector<std::size_t>& perm) {
  const std::size_t n = h.size();
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = h(perm[i], perm[j]);
  }
  return ChannelMatrix(n, std::move(g), h.noise_power());
}

std::vector<std::size_t> draw_perm(Rng& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

TEST(Properties, ProjectionIsIdempotent) {
  for_all(1, [](Rng& rng, std::size_t) -> std::string {
    const double p_max = draw_pmax(rng);
    const std::vector<double> x = draw_raw(rng, draw_links(rng, 30), p_max);
    const PowerVector once = project_box(x, p_max);
    const PowerVector twice = project_box(once.values(), p_max);
    if (!(once == twice)) return "projection moved a projected point";
    if (!in_box(once.values(), p_max)) return "projection left the box";
    return "";
  });
}

TEST(Properties, ProjectionIsNonExpansive) {
  for_all(2, [](Rng& rng, std::size_t) -> std::string {
    const double p_max = draw_pmax(rng);
    const std::size_t n = draw_links(rng, 30);
    const std::vector<double> x = draw_raw(rng, n, p_max);
    const std::vector<double> y = draw_raw(rng, n, p_max);
    const PowerVector px = project_box(x, p_max);
    const PowerVector py = project_box(y, p_max);
    double before = 0.0;
    double after = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      before += (x[i] - y[i]) * (x[i] - y[i]);
      after += (px[i] - py[i]) * (px[i] - py[i]);
    }
    if (after > before * (1.0 + 1e-15)) return "distance grew";
    return "";
  });
}

TEST(Properties, PgdIteratesFeasible) {
  for_all(3, [](Rng& rng, std::size_t) -> std::string {
    const std::size_t n = draw_links(rng, 8);
    const double p_max = draw_pmax(rng);
    const ChannelMatrix h = testing::random_channel(n, rng);
    PgdConfig cfg;
    cfg.step_size = std::uniform_real_distribution<double>(1e-3, 0.999)(rng);
    cfg.max_iters = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    cfg.init.rule = InitRule::kUniformRandom;
    const PowerVector p0 = initial_power(cfg.init, n, p_max, rng);
    // Every prefix of the run is itself a run, so checking the end point of
    // a random-length run covers every iterate across cases.
    const SolveResult r = run_pgd_from(h, cfg, p0);
    if (!in_box(r.p_final.values(), p_max)) return "iterate outside the box";
    if (!std::isfinite(r.sum_rate_final)) return "non-finite sum rate";
    return "";
  });
}

TEST(Properties, UnrolledLayerOutputsFeasible) {
  for_all(4, [](Rng& rng, std::size_t c) -> std::string {
    const std::size_t n = draw_links(rng, 6);
    const ChannelMatrix h = testing::random_channel(n, rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const Variant variant = c % 4 == 0 ? Variant::kMlpLayer : Variant::kScalarStep;
    UnfoldedParams params = init_params({k, variant, 5}, 0.1, n, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t l = 0; l < k; ++l) {
      params.delta1[l] = -u(rng);
      params.delta2[l] = u(rng);
    }
    if (variant == Variant::kMlpLayer) {
      std::normal_distribution<double> big(0.0, 50.0);
      for (MlpWeights& w : params.mlp) {
        for (double& v : w.b3) v = big(rng);
      }
    }
    const UnrollSetup setup;
    const ForwardResult f = dupgd_forward(params, h, setup.start(n));
    for (const LayerCache& layer : f.cache) {
      if (!in_box(layer.p_in, setup.p_max_w)) return "layer input outside the box";
    }
    if (!in_box(f.p_out.values(), setup.p_max_w)) return "output outside the box";
    return "";
  });
}

TEST(Properties, SumRateAndGradientPermutationEquivariant) {
  for_all(5, [](Rng& rng, std::size_t) -> std::string {
    const std::size_t n = draw_links(rng, 8);
    const ChannelMatrix h = testing::random_channel(n, rng);
    const std::vector<double> p = testing::random_power(n, 10.0, rng);
    const std::vector<std::size_t> perm = draw_perm(rng, n);
    const ChannelMatrix hp = permuted(h, perm);
    std::vector<double> pp(n);
    for (std::size_t i = 0; i < n; ++i) pp[i] = p[perm[i]];

    const double a = sum_rate(p, h);
    const double b = sum_rate(pp, hp);
    if (std::abs(a - b) > 1e-12 * std::max(1.0, a)) return "sum rate changed";
    const std::vector<double> g = grad_rho(p, h);
    const std::vector<double> gp = grad_rho(pp, hp);
    const GradDecomposition d = psi_phi(p, h);
    const GradDecomposition dp = psi_phi(pp, hp);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = perm[i];
      if (testing::relative_error(dp.psi[i], d.psi[j], 1e-300) > 1e-12) return "psi not permuted";
      if (testing::relative_error(dp.phi[i], d.phi[j], 1e-300) > 1e-12) return "phi not permuted";
      // -psi + phi can cancel, so the scale is the size of its two terms.
      if (std::abs(gp[i] - g[j]) > 1e-12 * (d.psi[j] + d.phi[j])) return "gradient not permuted";
    }
    return "";
  });
}

TEST(Properties, PgdAndScalarUnrollPermutationEquivariant) {
  for_all(6, [](Rng& rng, std::size_t) -> std::string {
    const std::size_t n = draw_links(rng, 6);
    const ChannelMatrix h = testing::random_channel(n, rng);
    const std::vector<std::size_t> perm = draw_perm(rng, n);
    const ChannelMatrix hp = permuted(h, perm);

    PgdConfig cfg;
    cfg.max_iters = 10;
    const PowerVector p0 = PowerVector::full(n, 10.0);
    const SolveResult r = run_pgd_from(h, cfg, p0);
    const SolveResult rp = run_pgd_from(hp, cfg, p0);

    UnfoldedParams params = init_params({4, Variant::kScalarStep, 1}, 0.1, n, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t l = 0; l < 4; ++l) {
      params.delta1[l] = -u(rng);
      params.delta2[l] = u(rng);
    }
    const PowerVector d = dupgd_forward(params, h, p0).p_out;
    const PowerVector dp = dupgd_forward(params, hp, p0).p_out;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(rp.p_final[i] - r.p_final[perm[i]]) > 1e-9) return "pgd not equivariant";
      if (std::abs(dp[i] - d[perm[i]]) > 1e-9) return "unroll not equivariant";
    }
    return "";
  });
}

TEST(Properties, DeltaRangesHoldAcrossRandomAdamSteps) {
  constexpr std::size_t kStepsPerCase = 10;  // 10^4 steps in total
  std::size_t steps = 0;
  for_all(7, [&](Rng& rng, std::size_t) -> std::string {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    NetConfig net{k, Variant::kScalarStep, 1};
    TrainConfig cfg;
    cfg.lr = std::pow(10.0, std::uniform_real_distribution<double>(-5.0, 1.0)(rng));
    cfg.init_step_size = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    UnfoldedParams params = init_params(net, cfg.init_step_size, 3, rng);
    AdamState state = AdamState::zeros(params.trainable_count());
    std::cauchy_distribution<double> heavy(0.0, 1.0);
    for (std::size_t s = 0; s < kStepsPerCase; ++s) {
      std::vector<double> grad(params.trainable_count());
      for (double& g : grad) g = heavy(rng);
      adam_step(params, grad, state, cfg);
      ++steps;
      for (std::size_t l = 0; l < k; ++l) {
        if (!(params.delta1[l] >= -1.0 && params.delta1[l] <= 0.0)) return "delta1 left [-1, 0]";
        if (!(params.delta2[l] >= 0.0 && params.delta2[l] <= 1.0)) return "delta2 left [0, 1]";
      }
    }
    return "";
  });
  EXPECT_EQ(steps, kCases * kStepsPerCase);
}

TEST(Properties, InterferenceTermsConsistent) {
  for_all(8, [](Rng& rng, std::size_t) -> std::string {
    const std::size_t n = draw_links(rng, 10);
    const ChannelMatrix h = testing::random_channel(n, rng);
    const std::vector<double> p = testing::random_power(n, 10.0, rng);
    const GradDecomposition d = psi_phi(p, h);
    for (std::size_t i = 0; i < n; ++i) {
      if (d.eta[i] < h.noise_power()) return "eta below noise";
      if (d.gamma[i] != d.eta[i] + p[i] * h(i, i)) return "gamma != eta + own signal";
      if (!(d.psi[i] > 0.0) || d.phi[i] < 0.0) return "sign of psi or phi";
    }
    return "";
  });
}

}  // namespace
}  // namespace tpc
