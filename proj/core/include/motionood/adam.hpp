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

#ifndef MOTIONOOD_ADAM_HPP_
#define MOTIONOOD_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "motionood/parameters.hpp"

namespace motionood {

struct AdamState {
  std::vector<Tensor> m;  // first moments, empty for buffers
  std::vector<Tensor> v;  // second moments
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_parameters(const ParameterSet& params);
};

// Global L2 norm over every non-empty gradient.
double global_norm(const Gradients& grads);

// Rescales every gradient by max_norm / g when the global norm g exceeds
// max_norm. Returns g.
double clip_gradients(Gradients& grads, double max_norm);

// Bias-corrected Adam update of the learnable tensors. Empty gradients are
// skipped.
void adam_step(ParameterSet& params, const Gradients& grads, AdamState& state,
               double learning_rate);

}  // namespace motionood

#endif  // MOTIONOOD_ADAM_HPP_
