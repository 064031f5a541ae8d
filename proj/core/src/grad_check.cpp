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

#include "motionood/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "motionood/error.hpp"

namespace motionood {

bool GradCheckReport::passed() const {
  return std::all_of(leaves.begin(), leaves.end(),
                     [](const LeafCheck& c) { return c.passed; });
}

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& c : leaves) m = std::max(m, c.max_rel_error);
  return m;
}

std::vector<std::string> GradCheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : leaves) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

GradCheckReport check_gradients_against(Graph& graph, Var output,
                                        const std::vector<NamedLeaf>& leaves,
                                        const std::vector<Tensor>& analytic,
                                        const GradCheckOptions& options) {
  if (options.step <= 0.0) throw UsageError("grad_check: step must be positive");
  if (analytic.size() != leaves.size()) {
    throw UsageError("grad_check: one analytic gradient per leaf required");
  }
  double floor = options.denominator_floor;
  if (options.scale_floor_by_output) {
    floor *= std::max(1.0, std::abs(graph.evaluate(output).item()));
  }
  GradCheckReport report;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    const NamedLeaf& named = leaves[li];
    if (!graph.is_leaf(named.leaf)) {
      throw UsageError("grad_check: '" + named.name + "' is not a leaf");
    }
    const Tensor original = graph.value(named.leaf);
    const Tensor& a = analytic[li];
    if (a.shape() != original.shape()) {
      throw ShapeError("grad_check: gradient shape mismatch for " + named.name);
    }
    LeafCheck check;
    check.name = named.name;
    check.elements = original.size();
    Tensor probe = original;
    for (std::size_t i = 0; i < original.size(); ++i) {
      probe[i] = original[i] + options.step;
      graph.set_value(named.leaf, probe);
      const double up = graph.evaluate(output).item();
      probe[i] = original[i] - options.step;
      graph.set_value(named.leaf, probe);
      const double down = graph.evaluate(output).item();
      probe[i] = original[i];

      const double numeric = (up - down) / (2.0 * options.step);
      const double abs_err = std::abs(a[i] - numeric);
      const double denom = std::max(
          {std::abs(a[i]), std::abs(numeric), floor});
      check.max_abs_error = std::max(check.max_abs_error, abs_err);
      check.max_rel_error = std::max(check.max_rel_error, abs_err / denom);
    }
    graph.set_value(named.leaf, original);
    check.passed = check.max_rel_error <= options.tolerance;
    report.leaves.push_back(std::move(check));
  }
  graph.evaluate(output);
  return report;
}

GradCheckReport grad_check(Graph& graph, Var output,
                           const std::vector<NamedLeaf>& leaves,
                           const GradCheckOptions& options) {
  graph.evaluate(output);
  graph.backward(output);
  std::vector<Tensor> analytic;
  analytic.reserve(leaves.size());
  for (const auto& l : leaves) analytic.push_back(graph.grad(l.leaf));
  return check_gradients_against(graph, output, leaves, analytic, options);
}

}  // namespace motionood
