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

#include "tpc/unfolded_net.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tpc/parallel.hpp"

namespace tpc {

namespace {

constexpr double kDelta1Min = -1.0;
constexpr double kDelta1Max = 0.0;
constexpr double kDelta2Min = 0.0;
constexpr double kDelta2Max = 1.0;

// out = W in + b, W row-major rows x cols.
void affine(std::span<const double> w, std::span<const double> b, std::span<const double> in,
            std::vector<double>& out) {
  const std::size_t rows = b.size();
  const std::size_t cols = in.size();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* row = w.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

// Accumulates dW += out_bar in^T, db += out_bar and returns in_bar = W^T out_bar.
std::vector<double> affine_backward(std::span<const double> w, std::span<const double> in,
                                    std::span<const double> out_bar, double* w_bar,
                                    double* b_bar) {
  const std::size_t rows = out_bar.size();
  const std::size_t cols = in.size();
  std::vector<double> in_bar(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double g = out_bar[r];
    b_bar[r] += g;
    if (g == 0.0) continue;
    const double* row = w.data() + r * cols;
    double* row_bar = w_bar + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      row_bar[c] += g * in[c];
      in_bar[c] += g * row[c];
    }
  }
  return in_bar;
}

void relu(const std::vector<double>& a, std::vector<double>& h) {
  h.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) h[i] = a[i] > 0.0 ? a[i] : 0.0;
}

// Offsets of each weight block inside one layer's flat slice.
struct MlpLayout {
  std::size_t w1, b1, w2, b2, w3, b3, total;

  explicit MlpLayout(const MlpWeights& m) {
    w1 = 0;
    b1 = w1 + m.w1.size();
    w2 = b1 + m.b1.size();
    b2 = w2 + m.w2.size();
    w3 = b2 + m.b2.size();
    b3 = w3 + m.w3.size();
    total = b3 + m.b3.size();
  }
};

std::size_t mlp_offset(const UnfoldedParams& params, std::size_t layer) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < layer; ++k) off += params.mlp[k].parameter_count();
  return off;
}

void check_finite(std::span<const double> v, std::size_t layer) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NonFiniteError("non-finite value in unrolled layer " + std::to_string(layer + 1));
    }
  }
}

}  // namespace

const char* to_string(Variant v) {
  return v == Variant::kScalarStep ? "scalar_step" : "mlp_layer";
}

Variant parse_variant(const std::string& s) {
  if (s == "scalar_step") return Variant::kScalarStep;
  if (s == "mlp_layer") return Variant::kMlpLayer;
  throw std::invalid_argument("unknown variant '" + s + "' (expected scalar_step or mlp_layer)");
}

std::size_t MlpWeights::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

void UnfoldedParams::validate() const {
  const std::size_t k = delta1.size();
  if (k == 0) throw std::invalid_argument("unfolded network needs at least one layer");
  if (delta2.size() != k) throw std::invalid_argument("delta1 and delta2 differ in length");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(delta1[i] >= kDelta1Min && delta1[i] <= kDelta1Max)) {
      throw std::invalid_argument("delta1[" + std::to_string(i) + "] outside [-1, 0]");
    }
    if (!(delta2[i] >= kDelta2Min && delta2[i] <= kDelta2Max)) {
      throw std::invalid_argument("delta2[" + std::to_string(i) + "] outside [0, 1]");
    }
  }
  if (variant == Variant::kScalarStep) {
    if (!mlp.empty()) throw std::invalid_argument("scalar_step network carries mlp weights");
    return;
  }
  if (mlp.size() != k) throw std::invalid_argument("mlp_layer network needs weights per layer");
  for (const MlpWeights& m : mlp) {
    const std::size_t n = m.n_links;
    const std::size_t h = m.hidden;
    if (n == 0 || h == 0 || m.w1.size() != h * 3 * n || m.b1.size() != h ||
        m.w2.size() != h * h || m.b2.size() != h || m.w3.size() != n * h || m.b3.size() != n) {
      throw std::invalid_argument("mlp weight shapes are inconsistent");
    }
  }
}

std::size_t UnfoldedParams::trainable_count() const {
  if (variant == Variant::kScalarStep) return 2 * n_layers();
  std::size_t total = 0;
  for (const MlpWeights& m : mlp) total += m.parameter_count();
  return total;
}

std::vector<double> UnfoldedParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(trainable_count());
  if (variant == Variant::kScalarStep) {
    flat.insert(flat.end(), delta1.begin(), delta1.end());
    flat.insert(flat.end(), delta2.begin(), delta2.end());
    return flat;
  }
  for (const MlpWeights& m : mlp) {
    for (const auto* block : {&m.w1, &m.b1, &m.w2, &m.b2, &m.w3, &m.b3}) {
      flat.insert(flat.end(), block->begin(), block->end());
    }
  }
  return flat;
}

void UnfoldedParams::unflatten(std::span<const double> flat) {
  if (flat.size() != trainable_count()) {
    throw std::invalid_argument("flat parameter vector has wrong length");
  }
  auto it = flat.begin();
  if (variant == Variant::kScalarStep) {
    std::copy_n(it, delta1.size(), delta1.begin());
    std::copy_n(it + static_cast<std::ptrdiff_t>(delta1.size()), delta2.size(), delta2.begin());
    return;
  }
  for (MlpWeights& m : mlp) {
    for (auto* block : {&m.w1, &m.b1, &m.w2, &m.b2, &m.w3, &m.b3}) {
      std::copy_n(it, block->size(), block->begin());
      it += static_cast<std::ptrdiff_t>(block->size());
    }
  }
}

std::vector<std::size_t> UnfoldedParams::layer_indices(std::size_t k) const {
  if (k >= n_layers()) throw std::out_of_range("layer index out of range");
  if (variant == Variant::kScalarStep) return {k, n_layers() + k};
  std::vector<std::size_t> idx(mlp[k].parameter_count());
  const std::size_t off = mlp_offset(*this, k);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = off + i;
  return idx;
}

void UnfoldedParams::clamp_deltas() {
  for (double& d : delta1) d = std::clamp(d, kDelta1Min, kDelta1Max);
  for (double& d : delta2) d = std::clamp(d, kDelta2Min, kDelta2Max);
}

void NetConfig::validate() const {
  if (n_layers == 0) throw std::invalid_argument("dupgd.n_layers must be >= 1");
  if (variant == Variant::kMlpLayer && hidden_width == 0) {
    throw std::invalid_argument("dupgd.hidden_width must be >= 1");
  }
}

UnfoldedParams init_params(const NetConfig& net, double init_step_size, std::size_t n_links,
                           Rng& rng) {
  net.validate();
  if (!(init_step_size >= 0.0 && init_step_size <= 1.0)) {
    throw std::invalid_argument("train.init_step_size must lie in [0, 1]");
  }
  UnfoldedParams params;
  params.variant = net.variant;
  params.delta1.assign(net.n_layers, -init_step_size);
  params.delta2.assign(net.n_layers, init_step_size);
  if (net.variant == Variant::kScalarStep) return params;

  if (n_links == 0) throw std::invalid_argument("mlp layers need n_links >= 1");
  const std::size_t n = n_links;
  const std::size_t h = net.hidden_width;
  auto fill = [&rng](std::vector<double>& v, std::size_t count, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    v.resize(count);
    for (double& x : v) x = u(rng);
  };
  params.mlp.resize(net.n_layers);
  for (MlpWeights& m : params.mlp) {
    m.n_links = n;
    m.hidden = h;
    fill(m.w1, h * 3 * n, 3 * n);
    fill(m.b1, h, 3 * n);
    fill(m.w2, h * h, h);
    fill(m.b2, h, h);
    fill(m.w3, n * h, h);
    fill(m.b3, n, h);
  }
  return params;
}

PowerVector UnrollSetup::start(std::size_t n) const {
  if (p0.rule == InitRule::kUniformRandom) {
    throw std::invalid_argument("unrolled evaluation needs a deterministic start point");
  }
  Rng unused(0);
  return initial_power(p0, n, p_max_w, unused);
}

ForwardResult dupgd_forward(const UnfoldedParams& params, const ChannelMatrix& h,
                            const PowerVector& p0) {
  return dupgd_forward(params, h, p0, params.n_layers());
}

ForwardResult dupgd_forward(const UnfoldedParams& params, const ChannelMatrix& h,
                            const PowerVector& p0, std::size_t active_layers) {
  params.validate();
  const std::size_t n = h.size();
  if (p0.size() != n) throw std::invalid_argument("initial power has wrong dimension");
  if (active_layers > params.n_layers()) throw std::invalid_argument("too many active layers");
  if (params.variant == Variant::kMlpLayer && params.mlp.front().n_links != n) {
    throw std::invalid_argument("mlp layers were built for a different number of links");
  }
  const double p_max = p0.p_max();

  std::vector<double> p(p0.values().begin(), p0.values().end());
  ForwardResult out;
  out.cache.resize(active_layers);
  for (std::size_t k = 0; k < active_layers; ++k) {
    LayerCache& c = out.cache[k];
    c.p_in = p;
    psi_phi_into(p, h, c.grad);
    c.z.resize(n);
    if (params.variant == Variant::kScalarStep) {
      for (std::size_t i = 0; i < n; ++i) {
        c.z[i] = weighted_step(p[i], c.grad.psi[i], c.grad.phi[i], params.delta1[k],
                               params.delta2[k]);
      }
    } else {
      const MlpWeights& m = params.mlp[k];
      c.x.resize(3 * n);
      for (std::size_t i = 0; i < n; ++i) {
        c.x[i] = p[i] / p_max;
        c.x[n + i] = std::log1p(p_max * c.grad.psi[i]);
        c.x[2 * n + i] = std::log1p(p_max * c.grad.phi[i]);
      }
      affine(m.w1, m.b1, c.x, c.a1);
      relu(c.a1, c.h1);
      affine(m.w2, m.b2, c.h1, c.a2);
      relu(c.a2, c.h2);
      affine(m.w3, m.b3, c.h2, c.z);
      for (double& v : c.z) v *= p_max;
    }
    check_finite(c.z, k);
    for (std::size_t i = 0; i < n; ++i) p[i] = clamp_power(c.z[i], p_max);
  }
  out.p_out = PowerVector(std::move(p), p_max);
  return out;
}

double loss(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
            const UnrollSetup& setup) {
  if (batch.empty()) throw std::invalid_argument("loss needs a nonempty batch");
  double total = 0.0;
  for (const ChannelMatrix& h : batch) {
    const ForwardResult fwd = dupgd_forward(params, h, setup.start(h.size()));
    total += sum_rate(fwd.p_out.values(), h);
  }
  return -total / static_cast<double>(batch.size());
}

namespace {

// Loss contribution -sum_rate(output) / batch_size of one channel and its
// gradient, accumulated into `grad`.
double backward_one(const UnfoldedParams& params, const ChannelMatrix& h,
                    const UnrollSetup& setup, std::size_t active_layers, double scale,
                    std::vector<double>& grad) {
  const std::size_t n = h.size();
  const double p_max = setup.p_max_w;
  const ForwardResult fwd = dupgd_forward(params, h, setup.start(n), active_layers);
  const std::span<const double> p_out = fwd.p_out.values();

  // d(-R)/dp = -Psi + Phi at the output.
  const GradDecomposition out_grad = psi_phi(p_out, h);
  std::vector<double> p_bar(n);
  for (std::size_t i = 0; i < n; ++i) p_bar[i] = scale * (-out_grad.psi[i] + out_grad.phi[i]);

  const std::size_t layers = params.n_layers();
  std::vector<double> z_bar(n);
  std::vector<double> psi_bar(n);
  std::vector<double> phi_bar(n);
  for (std::size_t k = active_layers; k-- > 0;) {
    const LayerCache& c = fwd.cache[k];
    for (std::size_t i = 0; i < n; ++i) {
      z_bar[i] = (c.z[i] >= 0.0 && c.z[i] <= p_max) ? p_bar[i] : 0.0;
    }

    std::vector<double> direct(n);  // gradient reaching p_in without passing through Psi/Phi
    if (params.variant == Variant::kScalarStep) {
      double g1 = 0.0;
      double g2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g1 -= z_bar[i] * c.grad.psi[i];
        g2 -= z_bar[i] * c.grad.phi[i];
        psi_bar[i] = -params.delta1[k] * z_bar[i];
        phi_bar[i] = -params.delta2[k] * z_bar[i];
        direct[i] = z_bar[i];
      }
      grad[k] += g1;
      grad[layers + k] += g2;
    } else {
      const MlpWeights& m = params.mlp[k];
      const MlpLayout layout(m);
      double* base = grad.data() + mlp_offset(params, k);

      std::vector<double> o_bar(n);
      for (std::size_t i = 0; i < n; ++i) o_bar[i] = p_max * z_bar[i];
      std::vector<double> h2_bar =
          affine_backward(m.w3, c.h2, o_bar, base + layout.w3, base + layout.b3);
      for (std::size_t j = 0; j < h2_bar.size(); ++j) {
        if (!(c.a2[j] > 0.0)) h2_bar[j] = 0.0;
      }
      std::vector<double> h1_bar =
          affine_backward(m.w2, c.h1, h2_bar, base + layout.w2, base + layout.b2);
      for (std::size_t j = 0; j < h1_bar.size(); ++j) {
        if (!(c.a1[j] > 0.0)) h1_bar[j] = 0.0;
      }
      const std::vector<double> x_bar =
          affine_backward(m.w1, c.x, h1_bar, base + layout.w1, base + layout.b1);
      for (std::size_t i = 0; i < n; ++i) {
        direct[i] = x_bar[i] / p_max;
        psi_bar[i] = x_bar[n + i] * p_max / (1.0 + p_max * c.grad.psi[i]);
        phi_bar[i] = x_bar[2 * n + i] * p_max / (1.0 + p_max * c.grad.phi[i]);
      }
    }

    const std::vector<double> through = psi_phi_vjp(c.p_in, h, c.grad, psi_bar, phi_bar);
    for (std::size_t i = 0; i < n; ++i) p_bar[i] = direct[i] + through[i];
  }
  return -scale * sum_rate(p_out, h);
}

}  // namespace

LossGrad backward(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
                  const UnrollSetup& setup, std::size_t workers) {
  return backward(params, batch, setup, params.n_layers(), workers);
}

LossGrad backward(const UnfoldedParams& params, std::span<const ChannelMatrix> batch,
                  const UnrollSetup& setup, std::size_t active_layers, std::size_t workers) {
  if (batch.empty()) throw std::invalid_argument("backward needs a nonempty batch");
  params.validate();
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t dim = params.trainable_count();

  std::vector<std::vector<double>> grads(batch.size(), std::vector<double>(dim, 0.0));
  std::vector<double> losses(batch.size(), 0.0);
  parallel_for(batch.size(), workers, [&](std::size_t b) {
    losses[b] = backward_one(params, batch[b], setup, active_layers, scale, grads[b]);
  });

  LossGrad out;
  out.grad.assign(dim, 0.0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out.loss += losses[b];
    for (std::size_t i = 0; i < dim; ++i) out.grad[i] += grads[b][i];
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("train.batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("train.lr must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("train.beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("train.beta2 must lie in (0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("train.eps must be > 0");
  if (!(init_step_size >= 0.0 && init_step_size <= 1.0)) {
    throw std::invalid_argument("train.init_step_size must lie in [0, 1]");
  }
}

void adam_step(UnfoldedParams& params, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg) {
  const std::size_t dim = params.trainable_count();
  if (grad.size() != dim || state.m.size() != dim || state.v.size() != dim) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  std::vector<double> theta = params.flatten();
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < dim; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
  params.unflatten(theta);
  params.clamp_deltas();
}

TrainResult train_offline(const TrainConfig& cfg, const ScenarioSpec& scenario,
                          const PropagationParams& propagation, const NetConfig& net,
                          const UnrollSetup& setup) {
  cfg.validate();
  scenario.validate();
  propagation.validate();
  const auto started = std::chrono::steady_clock::now();

  Rng init_rng = make_rng(cfg.seed, Stream::kInit, 0);
  TrainResult result{init_params(net, cfg.init_step_size, scenario.n_links, init_rng), {}};
  result.history.config = cfg;
  AdamState state = AdamState::zeros(result.params.trainable_count());

  for (std::size_t b = 0; b < cfg.n_batches; ++b) {
    Rng rng = make_rng(cfg.seed, Stream::kOfflineTraining, b);
    const std::vector<ChannelMatrix> batch =
        sample_batch(scenario, propagation, cfg.batch_size, rng);
    const LossGrad lg = backward(result.params, batch, setup, cfg.workers);
    result.history.losses.push_back(lg.loss);
    adam_step(result.params, lg.grad, state, cfg);
    if (cfg.record_snapshots) result.history.snapshots.push_back(result.params.flatten());
  }

  result.history.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

OnlineResult train_online(const UnfoldedParams& params, const ChannelMatrix& h,
                          const TrainConfig& cfg, const UnrollSetup& setup) {
  cfg.validate();
  OnlineResult out{params, {}, {}};
  const std::span<const ChannelMatrix> single(&h, 1);

  if (cfg.online_schedule == OnlineSchedule::kWholeUnroll) {
    AdamState state = AdamState::zeros(out.params.trainable_count());
    for (std::size_t s = 0; s < cfg.online_steps; ++s) {
      const LossGrad lg = backward(out.params, single, setup, 1);
      out.losses.push_back(lg.loss);
      adam_step(out.params, lg.grad, state, cfg);
    }
  } else {
    // Greedy: layer k is tuned on the k-layer truncated network while the
    // earlier layers stay frozen.
    for (std::size_t k = 0; k < out.params.n_layers(); ++k) {
      const std::vector<std::size_t> owned = out.params.layer_indices(k);
      AdamState state = AdamState::zeros(out.params.trainable_count());
      for (std::size_t s = 0; s < cfg.online_steps; ++s) {
        LossGrad lg = backward(out.params, single, setup, k + 1, 1);
        std::vector<double> masked(lg.grad.size(), 0.0);
        for (std::size_t i : owned) masked[i] = lg.grad[i];
        out.losses.push_back(lg.loss);
        adam_step(out.params, masked, state, cfg);
      }
    }
  }

  out.allocation = dupgd_forward(out.params, h, setup.start(h.size())).p_out;
  return out;
}

}  // namespace tpc
