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

#include "motionood/parameters.hpp"

#include "motionood/error.hpp"

namespace motionood {

std::size_t ParameterSet::add(std::string name, Tensor value, ParamGroup group,
                              ParamKind kind) {
  if (index_.contains(name)) {
    throw UsageError("duplicate parameter name '" + name + "'");
  }
  const std::size_t i = params_.size();
  index_.emplace(name, i);
  params_.push_back(Parameter{std::move(name), std::move(value), group, kind});
  return i;
}

std::optional<std::size_t> ParameterSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParameterSet::learnable_elements(std::optional<ParamGroup> group) const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p.kind != ParamKind::kLearnable) continue;
    if (group && p.group != *group) continue;
    n += p.value.size();
  }
  return n;
}

BoundParameters::BoundParameters(Graph& graph, const ParameterSet& set,
                                 bool trainable)
    : graph_(&graph), set_(&set) {
  vars_.reserve(set.size());
  for (const auto& p : set) {
    if (p.kind == ParamKind::kBuffer) {
      vars_.emplace_back();
    } else if (trainable) {
      vars_.push_back(graph.parameter(p.value));
    } else {
      vars_.push_back(graph.constant(p.value));
    }
  }
}

Var BoundParameters::operator[](std::size_t index) const {
  const Var& v = vars_.at(index);
  if (!v.valid()) {
    throw UsageError("parameter '" + (*set_)[index].name +
                     "' is a buffer and has no graph leaf");
  }
  return v;
}

Gradients BoundParameters::gradients() const {
  Gradients grads(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].valid()) grads[i] = graph_->grad(vars_[i]);
  }
  return grads;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

Tensor uniform_tensor(Shape shape, double bound, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

Tensor normal_tensor(Shape shape, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

Tensor dropout_mask(Shape shape, double p_drop, std::mt19937_64& rng) {
  if (p_drop < 0.0 || p_drop >= 1.0) {
    throw UsageError("dropout probability must lie in [0, 1)");
  }
  Tensor mask(std::move(shape), 1.0);
  if (p_drop == 0.0) return mask;
  const double keep = 1.0 - p_drop;
  std::bernoulli_distribution keep_dist(keep);
  for (double& v : mask.values()) v = keep_dist(rng) ? 1.0 / keep : 0.0;
  return mask;
}

}  // namespace motionood
