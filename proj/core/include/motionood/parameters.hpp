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

#ifndef MOTIONOOD_PARAMETERS_HPP_
#define MOTIONOOD_PARAMETERS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "motionood/autodiff.hpp"
#include "motionood/tensor.hpp"

namespace motionood {

// Which branch owns a tensor. Generative tensors can be dropped for
// prediction-only deployments.
enum class ParamGroup : std::uint8_t { kDiscriminative = 0, kGenerative = 1 };

// Learnable tensors receive gradients; buffers (batch-norm running statistics)
// are state updated outside the optimizer.
enum class ParamKind : std::uint8_t { kLearnable = 0, kBuffer = 1 };

struct Parameter {
  std::string name;
  Tensor value;
  ParamGroup group = ParamGroup::kDiscriminative;
  ParamKind kind = ParamKind::kLearnable;
};

// Ordered, named collection of model tensors. Indices are stable.
class ParameterSet {
 public:
  std::size_t add(std::string name, Tensor value, ParamGroup group,
                  ParamKind kind = ParamKind::kLearnable);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;

  // Total learnable elements, optionally restricted to one group.
  std::size_t learnable_elements(std::optional<ParamGroup> group = {}) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Gradient per parameter index; empty tensors for buffers.
using Gradients = std::vector<Tensor>;

// Graph leaves for the learnable tensors of a ParameterSet.
class BoundParameters {
 public:
  // With trainable = false every tensor becomes a constant leaf.
  BoundParameters(Graph& graph, const ParameterSet& set, bool trainable = true);

  Var operator[](std::size_t index) const;
  const ParameterSet& set() const { return *set_; }

  // Reads gradients after graph.backward(); buffers map to empty tensors.
  Gradients gradients() const;

 private:
  Graph* graph_;
  const ParameterSet* set_;
  std::vector<Var> vars_;
};

// Deterministic random streams used by a forward pass. Null streams are only
// allowed where no sampling happens (eval mode, dropout off).
struct ForwardRngs {
  std::mt19937_64* dropout = nullptr;
  std::mt19937_64* generative = nullptr;
};

// Seed for an independent random stream derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Tensor uniform_tensor(Shape shape, double bound, std::mt19937_64& rng);
Tensor normal_tensor(Shape shape, std::mt19937_64& rng);
// Inverted-dropout mask: kept entries are 1/(1-p), dropped entries 0.
Tensor dropout_mask(Shape shape, double p_drop, std::mt19937_64& rng);

}  // namespace motionood

#endif  // MOTIONOOD_PARAMETERS_HPP_
