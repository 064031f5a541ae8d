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

#ifndef MOTIONOOD_HYBRID_MODEL_HPP_
#define MOTIONOOD_HYBRID_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "motionood/gcn.hpp"
#include "motionood/vae.hpp"

namespace motionood {

struct ModelConfig {
  GcnConfig gcn;
  bool with_vae = true;
  VaeConfig vae;
  std::size_t observed = 10;  // N
  std::size_t future = 10;    // T
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  std::size_t window() const { return observed + future; }
  void validate() const;
};

// Discriminative GCN with an optional VAE branch sharing its first
// `vae.encoder_blocks` blocks. Parameters of both branches live in one
// ParameterSet: discriminative tensors first, generative tensors after, each
// initialised from its own random stream so the discriminative weights do not
// depend on whether the branch exists.
class HybridModel {
 public:
  HybridModel(const ModelConfig& config, std::uint64_t seed);
  // Adopts tensors by name (e.g. from a checkpoint). Every tensor the
  // configuration requires must be present with the right shape.
  HybridModel(const ModelConfig& config, const ParameterSet& tensors);

  const ModelConfig& config() const { return config_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }
  bool has_vae() const { return vae_.has_value(); }
  const GcnParams& gcn_params() const { return gcn_; }
  const VaeParams& vae_params() const;

  struct Trace {
    Var prediction;  // [B, K, M] coefficients
    Var trunk_tap;
    std::optional<LatentVars> latent;
    std::optional<DecoderVars> decoded;
    Var z;
    std::vector<BatchNormRecord> batch_norms;
  };

  // Records one forward pass. The generative branch is built only when the
  // model has one and `generative` is set; in train mode it samples eps from
  // rngs.generative, in eval mode z is the latent mean.
  Trace build(Graph& graph, const BoundParameters& params, Var input, Mode mode,
              ForwardRngs rngs, bool generative) const;

  // Folds the batch statistics of an evaluated training pass into the
  // running statistics (momentum config.bn_momentum, unbiased variance).
  void update_running_stats(const Graph& graph, const Trace& trace);

  // Eval-mode inference on plain tensors, processed in chunks.
  Tensor predict_coefficients(const Tensor& input) const;  // [B,K,M] -> [B,K,M]
  Tensor predict(const Tensor& observed) const;            // [B,K,N] -> [B,K,N+T]
  Tensor latent_means(const Tensor& input) const;          // [B,K,M] -> [B,K,n_z]

  // S, W, b (and the fully connected layers) set to zero, batch norms reset
  // to the identity.
  void zero_parameters();
  // Removes the generative tensors; the model becomes prediction-only.
  void drop_generative();

  std::size_t parameter_count() const { return params_.learnable_elements(); }
  std::size_t analytic_parameter_count() const;

 private:
  void build_structure(std::uint64_t seed);

  ModelConfig config_;
  ParameterSet params_;
  GcnParams gcn_;
  std::optional<VaeParams> vae_;
};

// [B, K, N] -> [B, K, N+T] by repeating the last observed frame.
Tensor replicate_pad(const Tensor& observed, std::size_t future);
// Replicate-pads and DCT-encodes a batch of observations: [B,K,N] -> [B,K,M].
Tensor encode_observed(const Tensor& observed, std::size_t future,
                       std::size_t coeffs);

}  // namespace motionood

#endif  // MOTIONOOD_HYBRID_MODEL_HPP_
