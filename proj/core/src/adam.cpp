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

#include "motionood/adam.hpp"

#include <cmath>

#include "motionood/error.hpp"

namespace motionood {

AdamState AdamState::for_parameters(const ParameterSet& params) {
  AdamState s;
  for (const auto& p : params) {
    const bool learnable = p.kind == ParamKind::kLearnable;
    s.m.push_back(learnable ? Tensor(p.value.shape(), 0.0) : Tensor());
    s.v.push_back(learnable ? Tensor(p.value.shape(), 0.0) : Tensor());
  }
  return s;
}

double global_norm(const Gradients& grads) {
  double acc = 0.0;
  for (const auto& g : grads) {
    for (double x : g.values()) acc += x * x;
  }
  return std::sqrt(acc);
}

double clip_gradients(Gradients& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("clip norm must be positive");
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& g : grads) {
      for (double& x : g.values()) x *= factor;
    }
  }
  return norm;
}

void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state,
               double learning_rate) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw ShapeError("adam_step: gradient/state count does not match parameters");
  }
  ++state.step;
  const double t = double(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    const Tensor& g = grads[i];
    if (p.kind != ParamKind::kLearnable || g.size() == 0) continue;
    if (g.shape() != p.value.shape()) {
      throw ShapeError("adam_step: gradient shape mismatch for '" + p.name + "'");
    }
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t j = 0; j < g.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p.value[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace motionood
