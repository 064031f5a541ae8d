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

#ifndef MOTIONOOD_VAE_HPP_
#define MOTIONOOD_VAE_HPP_

#include <cstddef>
#include <random>
#include <vector>

#include "motionood/gcn.hpp"

namespace motionood {

// Generative branch hung off the discriminative trunk.
//
//   trunk activation after `encoder_blocks` GCBs  [B, K, h]
//     -> flatten -> fully connected -> (mu_z, log sigma_z^2)   [B, K, n_z] x 2
//     -> z = mu_z + sigma_z * eps
//     -> fully connected -> [B, K, h] -> `decoder_blocks` GCBs
//     -> GCL head h -> 2M, split into (mu, log sigma^2)          [B, K, M] x 2
//
// Both log-variances are clamped to [log_var_min, log_var_max].
struct VaeConfig {
  std::size_t latent = 8;  // n_z per node
  std::size_t encoder_blocks = 6;
  std::size_t decoder_blocks = 6;
  double log_var_min = -20.0;
  double log_var_max = 3.0;

  void validate(const GcnConfig& gcn) const;
};

struct LinearParams {
  std::size_t weight = 0;
  std::size_t bias = 0;
};

struct VaeParams {
  LinearParams recognition;  // K*h -> 2*K*n_z
  LinearParams expand;       // K*n_z -> K*h
  std::vector<GcbParams> decoder;
  GclParams head;            // h -> 2*M
};

VaeParams add_vae(ParameterSet& set, const GcnConfig& gcn, const VaeConfig& vae,
                  std::mt19937_64& rng);

struct LatentVars {
  Var mu;       // [B, K, n_z]
  Var log_var;  // clamped
  Var sigma;
};

struct DecoderVars {
  Var mu;       // [B, K, M]
  Var log_var;  // clamped
};

LatentVars recognize(ForwardContext& ctx, const GcnConfig& gcn,
                     const VaeConfig& vae, const VaeParams& params, Var trunk);
// z = mu + sigma * eps; eps is a constant leaf so no gradient reaches it.
Var reparameterize(const LatentVars& latent, Var eps);
DecoderVars decode(ForwardContext& ctx, const GcnConfig& gcn,
                   const VaeConfig& vae, const VaeParams& params, Var z,
                   std::mt19937_64* rng);

// 1/2 * sum(mu^2 + sigma^2 - 1 - log sigma^2) over every element.
Var kl_divergence(const LatentVars& latent);
// -1/2 * sum(log sigma^2 + log 2pi + (C - mu)^2 / sigma^2) over every element.
// This is a log-likelihood: larger is better.
Var gaussian_log_likelihood(const DecoderVars& out, Var target);

// ---- Tensor-level versions ----

struct LatentParams {
  Tensor mu;     // K x n_z
  Tensor sigma;  // K x n_z, strictly positive
};

struct DecoderOutput {
  Tensor mu;       // K x (N+T)
  Tensor log_var;  // K x (N+T)
};

double kl_divergence(const LatentParams& latent);
double gaussian_log_likelihood(const DecoderOutput& out, const Tensor& target);
Tensor reparameterize(const LatentParams& latent, const Tensor& eps);
Tensor clamp_log_var(const Tensor& raw, const VaeConfig& vae);

std::size_t vae_parameter_count(const GcnConfig& gcn, const VaeConfig& vae);

}  // namespace motionood

#endif  // MOTIONOOD_VAE_HPP_
