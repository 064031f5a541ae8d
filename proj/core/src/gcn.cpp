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

#include "motionood/gcn.hpp"

#include <cmath>

#include "motionood/error.hpp"

namespace motionood {

void GcnConfig::validate() const {
  if (nodes == 0) throw ConfigError("gcn: node count must be positive");
  if (coeffs == 0) throw ConfigError("gcn: coefficient count must be positive");
  if (hidden == 0) throw ConfigError("gcn: hidden width must be positive");
  if (blocks == 0) throw ConfigError("gcn: block count must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("gcn: dropout must lie in [0, 1)");
  }
}

GclParams add_gcl(ParameterSet& set, const std::string& prefix,
                  std::size_t nodes, std::size_t in, std::size_t out,
                  ParamGroup group, std::mt19937_64& rng) {
  GclParams p;
  p.graph = set.add(prefix + ".S",
                    uniform_tensor({nodes, nodes}, 1.0 / std::sqrt(double(nodes)), rng),
                    group);
  p.weight = set.add(prefix + ".W",
                     uniform_tensor({in, out}, 1.0 / std::sqrt(double(in)), rng),
                     group);
  p.bias = set.add(prefix + ".b", Tensor({out}, 0.0), group);
  return p;
}

BatchNormParams add_batch_norm(ParameterSet& set, const std::string& prefix,
                               std::size_t nodes, std::size_t width,
                               ParamGroup group) {
  BatchNormParams p;
  p.gamma = set.add(prefix + ".gamma", Tensor({nodes, width}, 1.0), group);
  p.beta = set.add(prefix + ".beta", Tensor({nodes, width}, 0.0), group);
  p.running_mean = set.add(prefix + ".running_mean", Tensor({nodes, width}, 0.0),
                           group, ParamKind::kBuffer);
  p.running_var = set.add(prefix + ".running_var", Tensor({nodes, width}, 1.0),
                          group, ParamKind::kBuffer);
  return p;
}

GcbParams add_gcb(ParameterSet& set, const std::string& prefix,
                  std::size_t nodes, std::size_t width, double dropout,
                  ParamGroup group, std::mt19937_64& rng) {
  GcbParams p;
  p.dropout = dropout;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string idx = std::to_string(i);
    p.layers[i] = add_gcl(set, prefix + ".gcl" + idx, nodes, width, width, group, rng);
    p.norms[i] = add_batch_norm(set, prefix + ".bn" + idx, nodes, width, group);
  }
  return p;
}

GcnParams add_gcn(ParameterSet& set, const GcnConfig& config,
                  std::mt19937_64& rng) {
  config.validate();
  const auto group = ParamGroup::kDiscriminative;
  GcnParams p;
  p.input = add_gcl(set, "gcn.input", config.nodes, config.coeffs,
                    config.hidden, group, rng);
  p.input_norm = add_batch_norm(set, "gcn.input.bn", config.nodes,
                                config.hidden, group);
  for (std::size_t i = 0; i < config.blocks; ++i) {
    p.blocks.push_back(add_gcb(set, "gcn.block" + std::to_string(i),
                               config.nodes, config.hidden, config.dropout,
                               group, rng));
  }
  p.output = add_gcl(set, "gcn.output", config.nodes, config.hidden,
                     config.coeffs, group, rng);
  return p;
}

Var gcl_forward(ForwardContext& ctx, const GclParams& p, Var a) {
  const Var s = ctx.params[p.graph];
  const Var w = ctx.params[p.weight];
  const Var b = ctx.params[p.bias];
  const Shape& sa = a.shape();
  if (sa.size() < 2 || sa[sa.size() - 2] != s.shape()[0] ||
      sa.back() != w.shape()[0]) {
    throw ShapeError("gcl: activation " + shape_string(sa) +
                     " incompatible with S " + shape_string(s.shape()) +
                     " and W " + shape_string(w.shape()));
  }
  return add_bias(graph_mix(s, matmul(a, w)), b);
}

Var batch_norm_forward(ForwardContext& ctx, const BatchNormParams& p, Var x) {
  const Var gamma = ctx.params[p.gamma];
  const Var beta = ctx.params[p.beta];
  const ParameterSet& set = ctx.params.set();
  Var input = x;
  const bool unbatched = x.shape().size() == gamma.shape().size();
  if (unbatched) {
    Shape s = x.shape();
    s.insert(s.begin(), 1);
    input = reshape(x, s);
  }
  Var y;
  if (ctx.mode == Mode::kTrain) {
    y = batch_norm(input, gamma, beta, ctx.bn_eps);
    ctx.batch_norms.push_back({p.running_mean, p.running_var, y});
  } else {
    y = batch_norm_eval(input, gamma, beta, set[p.running_mean].value,
                        set[p.running_var].value, ctx.bn_eps);
  }
  return unbatched ? reshape(y, x.shape()) : y;
}

Var gcl_stack_forward(ForwardContext& ctx, const GclParams& layer,
                      const BatchNormParams& norm, double p_drop, Var a,
                      std::mt19937_64* rng) {
  Var y = tanh(batch_norm_forward(ctx, norm, gcl_forward(ctx, layer, a)));
  if (ctx.mode == Mode::kTrain && p_drop > 0.0) {
    if (rng == nullptr) throw UsageError("dropout requires a random stream");
    y = dropout(y, ctx.graph.constant(dropout_mask(y.shape(), p_drop, *rng)));
  }
  return y;
}

Var gcb_forward(ForwardContext& ctx, const GcbParams& p, Var a,
                std::mt19937_64* rng) {
  Var y = gcl_stack_forward(ctx, p.layers[0], p.norms[0], p.dropout, a, rng);
  y = gcl_stack_forward(ctx, p.layers[1], p.norms[1], p.dropout, y, rng);
  return a + y;
}

GcnTrace gcn_forward(ForwardContext& ctx, const GcnConfig& config,
                     const GcnParams& params, Var input, std::size_t tap_after,
                     std::mt19937_64* rng) {
  const Shape& s = input.shape();
  if (s.size() < 2 || s[s.size() - 2] != config.nodes ||
      s.back() != config.coeffs) {
    throw ShapeError("gcn: input " + shape_string(s) + " does not match K=" +
                     std::to_string(config.nodes) +
                     ", M=" + std::to_string(config.coeffs));
  }
  if (tap_after > params.blocks.size()) {
    throw UsageError("gcn: tap index beyond the last block");
  }
  GcnTrace trace;
  Var y = gcl_stack_forward(ctx, params.input, params.input_norm,
                            config.dropout, input, rng);
  if (tap_after == 0) trace.tap = y;
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    y = gcb_forward(ctx, params.blocks[i], y, rng);
    if (tap_after == i + 1) trace.tap = y;
  }
  trace.output = gcl_forward(ctx, params.output, y) + input;
  return trace;
}

std::size_t gcl_parameter_count(std::size_t nodes, std::size_t in, std::size_t out) {
  return nodes * nodes + in * out + out;
}

std::size_t gcb_parameter_count(std::size_t nodes, std::size_t width) {
  return 2 * (gcl_parameter_count(nodes, width, width) + 2 * nodes * width);
}

std::size_t gcn_parameter_count(const GcnConfig& c) {
  return gcl_parameter_count(c.nodes, c.coeffs, c.hidden) + 2 * c.nodes * c.hidden +
         c.blocks * gcb_parameter_count(c.nodes, c.hidden) +
         gcl_parameter_count(c.nodes, c.hidden, c.coeffs);
}

void zero_gcl(ParameterSet& set, const GclParams& p) {
  set[p.graph].value.fill(0.0);
  set[p.weight].value.fill(0.0);
  set[p.bias].value.fill(0.0);
}

void reset_batch_norm(ParameterSet& set, const BatchNormParams& p) {
  set[p.gamma].value.fill(1.0);
  set[p.beta].value.fill(0.0);
  set[p.running_mean].value.fill(0.0);
  set[p.running_var].value.fill(1.0);
}

void zero_gcb(ParameterSet& set, const GcbParams& p) {
  for (std::size_t i = 0; i < 2; ++i) {
    zero_gcl(set, p.layers[i]);
    reset_batch_norm(set, p.norms[i]);
  }
}

}  // namespace motionood
