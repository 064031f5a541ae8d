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

#ifndef MOTIONOOD_GRAD_CHECK_HPP_
#define MOTIONOOD_GRAD_CHECK_HPP_

#include <string>
#include <vector>

#include "motionood/autodiff.hpp"

namespace motionood {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Per-element relative error is |analytic - numeric| divided by
  // max(|analytic|, |numeric|, denominator_floor). The floor keeps entries
  // whose true gradient is zero (e.g. a bias feeding a batch norm) from being
  // judged on round-off alone.
  double denominator_floor = 1e-6;
  // Multiplies the floor by max(1, |output|) so the check does not change
  // when the output is rescaled by a constant.
  bool scale_floor_by_output = true;
};

struct NamedLeaf {
  std::string name;
  Var leaf;
};

struct LeafCheck {
  std::string name;
  std::size_t elements = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<LeafCheck> leaves;

  bool passed() const;
  double max_rel_error() const;
  std::vector<std::string> failures() const;
};

// Compares the analytic gradient of the scalar `output` against central
// differences for every element of every listed leaf. Leaf values are
// restored afterwards. Never throws on a mismatch; read the report.
GradCheckReport grad_check(Graph& graph, Var output,
                           const std::vector<NamedLeaf>& leaves,
                           const GradCheckOptions& options = {});

// As grad_check, but judges caller-supplied gradients (one per leaf).
GradCheckReport check_gradients_against(Graph& graph, Var output,
                                        const std::vector<NamedLeaf>& leaves,
                                        const std::vector<Tensor>& analytic,
                                        const GradCheckOptions& options = {});

}  // namespace motionood

#endif  // MOTIONOOD_GRAD_CHECK_HPP_
