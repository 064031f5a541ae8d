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

#ifndef MOTIONOOD_GCN_HPP_
#define MOTIONOOD_GCN_HPP_

#include <array>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "motionood/autodiff.hpp"
#include "motionood/parameters.hpp"

namespace motionood {

enum class Mode { kTrain, kEval };

// One training-mode batch-norm node and the parameters whose running
// statistics it should update once the forward pass has been evaluated.
struct BatchNormRecord {
  std::size_t running_mean = 0;
  std::size_t running_var = 0;
  Var node;
};

// Shared state for building one forward pass into a graph.
struct ForwardContext {
  Graph& graph;
  const BoundParameters& params;
  Mode mode = Mode::kEval;
  double bn_eps = 1e-5;
  std::vector<BatchNormRecord> batch_norms;
};

// Indices into a ParameterSet. S is K x K, W is n_in x n_out, b is n_out.
struct GclParams {
  std::size_t graph = 0;
  std::size_t weight = 0;
  std::size_t bias = 0;
};

struct BatchNormParams {
  std::size_t gamma = 0;
  std::size_t beta = 0;
  std::size_t running_mean = 0;
  std::size_t running_var = 0;
};

// Residual block of two graph layers, each followed by batch norm, tanh and
// dropout.
struct GcbParams {
  std::array<GclParams, 2> layers;
  std::array<BatchNormParams, 2> norms;
  double dropout = 0.0;
};

struct GcnConfig {
  std::size_t nodes = 0;    // K
  std::size_t coeffs = 0;   // M, DCT coefficients per node
  std::size_t hidden = 256;
  std::size_t blocks = 12;
  double dropout = 0.0;

  void validate() const;
};

struct GcnParams {
  GclParams input;
  BatchNormParams input_norm;
  std::vector<GcbParams> blocks;
  GclParams output;
};

GclParams add_gcl(ParameterSet& set, const std::string& prefix,
                  std::size_t nodes, std::size_t in, std::size_t out,
                  ParamGroup group, std::mt19937_64& rng);
BatchNormParams add_batch_norm(ParameterSet& set, const std::string& prefix,
                               std::size_t nodes, std::size_t width,
                               ParamGroup group);
GcbParams add_gcb(ParameterSet& set, const std::string& prefix,
                  std::size_t nodes, std::size_t width, double dropout,
                  ParamGroup group, std::mt19937_64& rng);
GcnParams add_gcn(ParameterSet& set, const GcnConfig& config,
                  std::mt19937_64& rng);

// S * A * W + b for A of shape [B, K, n_in] (or [K, n_in]).
Var gcl_forward(ForwardContext& ctx, const GclParams& p, Var a);
Var batch_norm_forward(ForwardContext& ctx, const BatchNormParams& p, Var x);
// dropout(tanh(batch_norm(GCL(a)))); dropout is skipped in eval mode or when
// p_drop is zero.
Var gcl_stack_forward(ForwardContext& ctx, const GclParams& layer,
                      const BatchNormParams& norm, double p_drop, Var a,
                      std::mt19937_64* rng);
Var gcb_forward(ForwardContext& ctx, const GcbParams& p, Var a,
                std::mt19937_64* rng);

struct GcnTrace {
  Var output;   // [B, K, M] predicted coefficients
  Var tap;      // activation after block `tap_after` (or the input stack)
};

// Input stack (M -> hidden) -> residual blocks -> output GCL (hidden -> M)
// -> + input. `tap_after` selects the activation returned in trace.tap:
// 0 is the input stack, i is the output of block i.
GcnTrace gcn_forward(ForwardContext& ctx, const GcnConfig& config,
                     const GcnParams& params, Var input, std::size_t tap_after,
                     std::mt19937_64* rng);

// Closed-form learnable-parameter counts (S, W, b and batch-norm scale/shift).
std::size_t gcl_parameter_count(std::size_t nodes, std::size_t in, std::size_t out);
std::size_t gcb_parameter_count(std::size_t nodes, std::size_t width);
std::size_t gcn_parameter_count(const GcnConfig& config);

// Overwrites S, W, b with zero and resets every batch norm to the identity
// (gamma 1, beta 0, running mean 0, running variance 1).
void zero_gcl(ParameterSet& set, const GclParams& p);
void reset_batch_norm(ParameterSet& set, const BatchNormParams& p);
void zero_gcb(ParameterSet& set, const GcbParams& p);

}  // namespace motionood

#endif  // MOTIONOOD_GCN_HPP_
