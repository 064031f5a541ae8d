// Copyright 2026 The motionood Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "motionood/hybrid_model.hpp"

#include <algorithm>

#include "motionood/dct.hpp"
#include "motionood/error.hpp"

namespace motionood {
namespace {

constexpr std::size_t kInferenceChunk = 256;

Tensor slice_batch(const Tensor& t, std::size_t begin, std::size_t end) {
  Shape s = t.shape();
  const std::size_t per = t.size() / s[0];
  s[0] = end - begin;
  return Tensor(s, std::vector<double>(t.data() + begin * per, t.data() + end * per));
}

void check_batched(const Tensor& t, std::size_t k, std::size_t width,
                   const char* what) {
  if (t.rank() != 3 || t.dim(1) != k || t.dim(2) != width) {
    throw ShapeError(std::string(what) + ": expected [B, " + std::to_string(k) +
                     ", " + std::to_string(width) + "], got " +
                     shape_string(t.shape()));
  }
}

}  // namespace

void ModelConfig::validate() const {
  gcn.validate();
  if (observed < 1) throw ConfigError("model: observed frame count must be >= 1");
  if (gcn.coeffs > window()) {
    throw ConfigError("model: retained coefficients exceed N+T");
  }
  if (with_vae) vae.validate(gcn);
  if (bn_eps <= 0.0) throw ConfigError("model: batch-norm eps must be positive");
  if (bn_momentum <= 0.0 || bn_momentum > 1.0) {
    throw ConfigError("model: batch-norm momentum must lie in (0, 1]");
  }
}

HybridModel::HybridModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  build_structure(seed);
}

HybridModel::HybridModel(const ModelConfig& config, const ParameterSet& tensors)
    : config_(config) {
  config_.validate();
  build_structure(0);
  for (auto& p : params_) {
    const auto idx = tensors.find(p.name);
    if (!idx) throw CheckpointError("missing tensor '" + p.name + "'");
    const Tensor& src = tensors[*idx].value;
    if (src.shape() != p.value.shape()) {
      throw CheckpointError("tensor '" + p.name + "' has shape " +
                            shape_string(src.shape()) + ", expected " +
                            shape_string(p.value.shape()));
    }
    p.value = src;
  }
}

void HybridModel::build_structure(std::uint64_t seed) {
  std::mt19937_64 gcn_rng(derive_seed(seed, 1));
  gcn_ = add_gcn(params_, config_.gcn, gcn_rng);
  if (config_.with_vae) {
    std::mt19937_64 vae_rng(derive_seed(seed, 2));
    vae_ = add_vae(params_, config_.gcn, config_.vae, vae_rng);
  }
}

const VaeParams& HybridModel::vae_params() const {
  if (!vae_) throw UsageError("model has no generative branch");
  return *vae_;
}

HybridModel::Trace HybridModel::build(Graph& graph, const BoundParameters& params,
                                      Var input, Mode mode, ForwardRngs rngs,
                                      bool generative) const {
  ForwardContext ctx{graph, params, mode, config_.bn_eps, {}};
  const bool with_branch = generative && vae_.has_value();
  const std::size_t tap = with_branch ? config_.vae.encoder_blocks : 0;
  const GcnTrace gcn = gcn_forward(ctx, config_.gcn, gcn_, input, tap, rngs.dropout);

  Trace trace;
  trace.prediction = gcn.output;
  trace.trunk_tap = gcn.tap;
  if (with_branch) {
    Var trunk = gcn.tap;
    if (trunk.shape().size() == 2) {
      trunk = reshape(trunk, {1, config_.gcn.nodes, config_.gcn.hidden});
    }
    trace.latent = recognize(ctx, config_.gcn, config_.vae, *vae_, trunk);
    if (mode == Mode::kTrain) {
      if (rngs.generative == nullptr) {
        throw UsageError("training the generative branch requires a random stream");
      }
      Var eps = graph.constant(normal_tensor(trace.latent->mu.shape(), *rngs.generative));
      trace.z = reparameterize(*trace.latent, eps);
    } else {
      trace.z = trace.latent->mu;
    }
    trace.decoded = decode(ctx, config_.gcn, config_.vae, *vae_, trace.z,
                           rngs.generative);
  }
  trace.batch_norms = std::move(ctx.batch_norms);
  return trace;
}

void HybridModel::update_running_stats(const Graph& graph, const Trace& trace) {
  const double m = config_.bn_momentum;
  for (const auto& rec : trace.batch_norms) {
    const Tensor& mean = graph.batch_mean(rec.node);
    const Tensor& var = graph.batch_var(rec.node);
    const std::size_t batch = graph.shape(rec.node)[0];
    const double correction = batch > 1 ? double(batch) / double(batch - 1) : 1.0;
    Tensor& rm = params_[rec.running_mean].value;
    Tensor& rv = params_[rec.running_var].value;
    for (std::size_t i = 0; i < rm.size(); ++i) {
      rm[i] = (1.0 - m) * rm[i] + m * mean[i];
      rv[i] = (1.0 - m) * rv[i] + m * var[i] * correction;
    }
  }
}

Tensor HybridModel::predict_coefficients(const Tensor& input) const {
  check_batched(input, config_.gcn.nodes, config_.gcn.coeffs, "predict_coefficients");
  Tensor out(input.shape());
  const std::size_t batch = input.dim(0);
  const std::size_t per = input.size() / std::max<std::size_t>(batch, 1);
  for (std::size_t begin = 0; begin < batch; begin += kInferenceChunk) {
    const std::size_t end = std::min(batch, begin + kInferenceChunk);
    Graph graph;
    BoundParameters bound(graph, params_, /*trainable=*/false);
    Var x = graph.constant(slice_batch(input, begin, end));
    Trace trace = build(graph, bound, x, Mode::kEval, {}, false);
    const Tensor& y = graph.evaluate(trace.prediction);
    std::copy(y.values().begin(), y.values().end(), out.data() + begin * per);
  }
  return out;
}

Tensor HybridModel::predict(const Tensor& observed) const {
  check_batched(observed, config_.gcn.nodes, config_.observed, "predict");
  const Tensor coeffs = predict_coefficients(
      encode_observed(observed, config_.future, config_.gcn.coeffs));
  return apply_last_axis(coeffs, dct_inverse_matrix(config_.window(),
                                                    config_.gcn.coeffs));
}

Tensor HybridModel::latent_means(const Tensor& input) const {
  if (!vae_) throw UsageError("model has no generative branch");
  check_batched(input, config_.gcn.nodes, config_.gcn.coeffs, "latent_means");
  const std::size_t batch = input.dim(0), k = config_.gcn.nodes;
  const std::size_t nz = config_.vae.latent;
  Tensor out({batch, k, nz});
  for (std::size_t begin = 0; begin < batch; begin += kInferenceChunk) {
    const std::size_t end = std::min(batch, begin + kInferenceChunk);
    Graph graph;
    BoundParameters bound(graph, params_, false);
    Var x = graph.constant(slice_batch(input, begin, end));
    Trace trace = build(graph, bound, x, Mode::kEval, {}, true);
    const Tensor& mu = graph.evaluate(trace.latent->mu);
    std::copy(mu.values().begin(), mu.values().end(), out.data() + begin * k * nz);
  }
  return out;
}

void HybridModel::zero_parameters() {
  zero_gcl(params_, gcn_.input);
  reset_batch_norm(params_, gcn_.input_norm);
  for (const auto& b : gcn_.blocks) zero_gcb(params_, b);
  zero_gcl(params_, gcn_.output);
  if (vae_) {
    for (auto idx : {vae_->recognition.weight, vae_->recognition.bias,
                     vae_->expand.weight, vae_->expand.bias}) {
      params_[idx].value.fill(0.0);
    }
    for (const auto& b : vae_->decoder) zero_gcb(params_, b);
    zero_gcl(params_, vae_->head);
  }
}

void HybridModel::drop_generative() {
  if (!vae_) return;
  ParameterSet kept;
  for (const auto& p : params_) {
    if (p.group == ParamGroup::kDiscriminative) {
      kept.add(p.name, p.value, p.group, p.kind);
    }
  }
  config_.with_vae = false;
  vae_.reset();
  params_ = std::move(kept);
}

std::size_t HybridModel::analytic_parameter_count() const {
  std::size_t n = gcn_parameter_count(config_.gcn);
  if (vae_) n += vae_parameter_count(config_.gcn, config_.vae);
  return n;
}

Tensor replicate_pad(const Tensor& observed, std::size_t future) {
  if (observed.rank() != 3 || observed.dim(2) == 0) {
    throw ShapeError("replicate_pad: expected non-empty [B, K, N], got " +
                     shape_string(observed.shape()));
  }
  const std::size_t b = observed.dim(0), k = observed.dim(1), n = observed.dim(2);
  Tensor out({b, k, n + future});
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < n; ++c) out.at(i, r, c) = observed.at(i, r, c);
      for (std::size_t c = n; c < n + future; ++c) {
        out.at(i, r, c) = observed.at(i, r, n - 1);
      }
    }
  }
  return out;
}

Tensor encode_observed(const Tensor& observed, std::size_t future,
                       std::size_t coeffs) {
  const Tensor padded = replicate_pad(observed, future);
  return apply_last_axis(padded, dct_forward_matrix(padded.dim(2), coeffs));
}

}  // namespace motionood
