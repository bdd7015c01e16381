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

#include "tpc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tpc/objective.hpp"
#include "tpc/random.hpp"
#include "tpc/unfolded_net.hpp"

namespace tpc {
namespace {

// Extended precision keeps the cancellation error of the stencil well
// below the tolerance even for tiny gradient entries.
long double sum_rate_ld(const std::vector<double>& p, const ChannelMatrix& h) {
  const std::size_t n = h.size();
  long double total = 0.0L;
  for (std::size_t rx = 0; rx < n; ++rx) {
    long double interference = h.noise_power();
    for (std::size_t tx = 0; tx < n; ++tx) {
      if (tx != rx) interference += static_cast<long double>(p[tx]) * h(tx, rx);
    }
    total += std::log2(1.0L + static_cast<long double>(p[rx]) * h(rx, rx) / interference);
  }
  return total;
}

double rel_error(double a, double ref, double floor) {
  return std::abs(a - ref) / std::max({std::abs(a), std::abs(ref), floor});
}

ChannelMatrix instance(const GradcheckConfig& cfg, std::size_t n, std::uint64_t index, Rng& rng) {
  ScenarioSpec spec = cfg.scenario;
  spec.n_links = n;
  rng = make_rng(cfg.seed, Stream::kTest, index);
  const Deployment dep = generate_deployment(spec, rng);
  return sample_channel(dep, cfg.propagation, rng);
}

}  // namespace

GradcheckResult run_gradcheck(const GradcheckConfig& cfg) {
  GradcheckResult out;
  std::uint64_t index = 0;

  for (std::size_t n : {1u, 2u, 5u, 10u}) {
    for (std::size_t t = 0; t < cfg.instances; ++t) {
      Rng rng;
      const ChannelMatrix h = instance(cfg, n, index++, rng);
      std::uniform_real_distribution<double> u(0.0, cfg.p_max_w);
      std::vector<double> p(n);
      for (double& v : p) {
        const double step = 1e-6 * std::max(cfg.p_max_w, 1.0);
        v = std::clamp(u(rng), step, cfg.p_max_w - step);
      }
      const std::vector<double> g = grad_rho(p, h);
      for (std::size_t i = 0; i < n; ++i) {
        const double step = 1e-6 * std::max(p[i], 1.0);
        std::vector<double> up = p;
        std::vector<double> down = p;
        up[i] += step;
        down[i] -= step;
        const long double diff = sum_rate_ld(up, h) - sum_rate_ld(down, h);
        const double fd = static_cast<double>(-diff / (up[i] - down[i]));
        out.grad_rho_max_rel_error = std::max(out.grad_rho_max_rel_error, rel_error(g[i], fd, 1e-12));
        ++out.grad_rho_checks;
      }
    }
  }

  const UnrollSetup setup{cfg.p_max_w, {}};
  for (Variant variant : {Variant::kScalarStep, Variant::kMlpLayer}) {
    for (std::size_t k : {1u, 3u, 5u}) {
      for (std::size_t n : {2u, 4u}) {
        Rng rng;
        std::vector<ChannelMatrix> batch;
        for (int b = 0; b < 3; ++b) batch.push_back(instance(cfg, n, index++, rng));
        UnfoldedParams params = init_params({k, variant, 6}, 0.1, n, rng);
        if (variant == Variant::kScalarStep) {
          std::uniform_real_distribution<double> u(0.02, 0.2);
          for (std::size_t l = 0; l < k; ++l) {
            params.delta1[l] = -u(rng);
            params.delta2[l] = u(rng);
          }
        }
        const LossGrad lg = backward(params, batch, setup);
        // Stencil round-off is about eps * |loss| / step; entries below this
        // floor are numerically zero.
        const double floor = 1e-6 * std::max(1.0, std::abs(lg.loss));
        const std::vector<double> x = params.flatten();
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double step = 1e-5;
          std::vector<double> up = x;
          std::vector<double> down = x;
          up[i] += step;
          down[i] -= step;
          UnfoldedParams q = params;
          q.unflatten(up);
          const double f_up = loss(q, batch, setup);
          q.unflatten(down);
          const double f_down = loss(q, batch, setup);
          const double fd = (f_up - f_down) / (up[i] - down[i]);
          out.backward_max_rel_error =
              std::max(out.backward_max_rel_error, rel_error(lg.grad[i], fd, floor));
          ++out.backward_checks;
        }
      }
    }
  }
  return out;
}

}  // namespace tpc
