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

#include "motionood/vae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "motionood/error.hpp"

namespace motionood {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

LinearParams add_linear(ParameterSet& set, const std::string& prefix,
                        std::size_t in, std::size_t out, std::mt19937_64& rng) {
  LinearParams p;
  p.weight = set.add(prefix + ".W",
                     uniform_tensor({in, out}, 1.0 / std::sqrt(double(in)), rng),
                     ParamGroup::kGenerative);
  p.bias = set.add(prefix + ".b", Tensor({out}, 0.0), ParamGroup::kGenerative);
  return p;
}

Var linear_forward(ForwardContext& ctx, const LinearParams& p, Var x) {
  return add_bias(matmul(x, ctx.params[p.weight]), ctx.params[p.bias]);
}

}  // namespace

void VaeConfig::validate(const GcnConfig& gcn) const {
  if (latent == 0) throw ConfigError("vae: latent width must be positive");
  if (encoder_blocks > gcn.blocks) {
    throw ConfigError("vae: encoder shares more blocks than the trunk has");
  }
  if (decoder_blocks == 0) throw ConfigError("vae: decoder needs >= 1 block");
  if (!(log_var_min < log_var_max)) {
    throw ConfigError("vae: log-variance clamp range is empty");
  }
}

VaeParams add_vae(ParameterSet& set, const GcnConfig& gcn, const VaeConfig& vae,
                  std::mt19937_64& rng) {
  vae.validate(gcn);
  const std::size_t k = gcn.nodes, h = gcn.hidden, nz = vae.latent;
  VaeParams p;
  p.recognition = add_linear(set, "vae.recognition", k * h, 2 * k * nz, rng);
  p.expand = add_linear(set, "vae.expand", k * nz, k * h, rng);
  for (std::size_t i = 0; i < vae.decoder_blocks; ++i) {
    p.decoder.push_back(add_gcb(set, "vae.decoder" + std::to_string(i), k, h,
                                gcn.dropout, ParamGroup::kGenerative, rng));
  }
  p.head = add_gcl(set, "vae.head", k, h, 2 * gcn.coeffs,
                   ParamGroup::kGenerative, rng);
  return p;
}

LatentVars recognize(ForwardContext& ctx, const GcnConfig& gcn,
                     const VaeConfig& vae, const VaeParams& params, Var trunk) {
  const Shape& s = trunk.shape();
  if (s.size() != 3 || s[1] != gcn.nodes || s[2] != gcn.hidden) {
    throw ShapeError("recognize: expected [B, K, h] trunk, got " + shape_string(s));
  }
  const std::size_t batch = s[0], k = gcn.nodes, nz = vae.latent;
  Var flat = reshape(trunk, {batch, k * gcn.hidden});
  Var stats = linear_forward(ctx, params.recognition, flat);
  LatentVars out;
  out.mu = reshape(slice_last(stats, 0, k * nz), {batch, k, nz});
  Var raw = reshape(slice_last(stats, k * nz, 2 * k * nz), {batch, k, nz});
  out.log_var = clamp(raw, vae.log_var_min, vae.log_var_max);
  out.sigma = exp(scale(out.log_var, 0.5));
  return out;
}

Var reparameterize(const LatentVars& latent, Var eps) {
  if (eps.graph().requires_grad(eps)) {
    throw UsageError("reparameterize: eps must be a constant draw");
  }
  return latent.mu + latent.sigma * eps;
}

DecoderVars decode(ForwardContext& ctx, const GcnConfig& gcn,
                   const VaeConfig& vae, const VaeParams& params, Var z,
                   std::mt19937_64* rng) {
  const Shape& s = z.shape();
  if (s.size() != 3 || s[1] != gcn.nodes || s[2] != vae.latent) {
    throw ShapeError("decode: expected [B, K, n_z] sample, got " + shape_string(s));
  }
  const std::size_t batch = s[0], k = gcn.nodes, m = gcn.coeffs;
  Var y = linear_forward(ctx, params.expand, reshape(z, {batch, k * vae.latent}));
  y = reshape(y, {batch, k, gcn.hidden});
  for (const auto& block : params.decoder) y = gcb_forward(ctx, block, y, rng);
  Var head = gcl_forward(ctx, params.head, y);
  DecoderVars out;
  out.mu = slice_last(head, 0, m);
  out.log_var = clamp(slice_last(head, m, 2 * m), vae.log_var_min, vae.log_var_max);
  return out;
}

Var kl_divergence(const LatentVars& latent) {
  const double count = double(shape_size(latent.mu.shape()));
  Var terms = square(latent.mu) + exp(latent.log_var) - latent.log_var;
  return add_scalar(scale(sum(terms), 0.5), -0.5 * count);
}

Var gaussian_log_likelihood(const DecoderVars& out, Var target) {
  if (target.shape() != out.mu.shape()) {
    throw ShapeError("gaussian_log_likelihood: target " +
                     shape_string(target.shape()) + " vs mean " +
                     shape_string(out.mu.shape()));
  }
  const double count = double(shape_size(target.shape()));
  Var residual = square(target - out.mu) * exp(scale(out.log_var, -1.0));
  Var total = sum(out.log_var + residual);
  return add_scalar(scale(total, -0.5), -0.5 * count * kLog2Pi);
}

double kl_divergence(const LatentParams& latent) {
  if (latent.mu.shape() != latent.sigma.shape()) {
    throw ShapeError("kl_divergence: mu and sigma shapes differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < latent.mu.size(); ++i) {
    const double m = latent.mu[i], s = latent.sigma[i];
    if (!(s > 0.0)) throw NumericError("kl_divergence: sigma must be positive");
    acc += m * m + s * s - 1.0 - std::log(s * s);
  }
  return 0.5 * acc;
}

double gaussian_log_likelihood(const DecoderOutput& out, const Tensor& target) {
  if (out.mu.shape() != target.shape() || out.log_var.shape() != target.shape()) {
    throw ShapeError("gaussian_log_likelihood: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = target[i] - out.mu[i];
    acc += out.log_var[i] + kLog2Pi + d * d / std::exp(out.log_var[i]);
  }
  return -0.5 * acc;
}

Tensor reparameterize(const LatentParams& latent, const Tensor& eps) {
  if (eps.shape() != latent.mu.shape() || latent.sigma.shape() != latent.mu.shape()) {
    throw ShapeError("reparameterize: shape mismatch");
  }
  Tensor z(latent.mu.shape());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = latent.mu[i] + latent.sigma[i] * eps[i];
  }
  return z;
}

Tensor clamp_log_var(const Tensor& raw, const VaeConfig& vae) {
  Tensor out = raw;
  for (double& v : out.values()) v = std::clamp(v, vae.log_var_min, vae.log_var_max);
  return out;
}

std::size_t vae_parameter_count(const GcnConfig& gcn, const VaeConfig& vae) {
  const std::size_t k = gcn.nodes, h = gcn.hidden, nz = vae.latent;
  const std::size_t recognition = k * h * 2 * k * nz + 2 * k * nz;
  const std::size_t expand = k * nz * k * h + k * h;
  return recognition + expand + vae.decoder_blocks * gcb_parameter_count(k, h) +
         gcl_parameter_count(k, h, 2 * gcn.coeffs);
}

}  // namespace motionood
