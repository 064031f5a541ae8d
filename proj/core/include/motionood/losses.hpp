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

#ifndef MOTIONOOD_LOSSES_HPP_
#define MOTIONOOD_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "motionood/autodiff.hpp"
#include "motionood/representation.hpp"
#include "motionood/tensor.hpp"

namespace motionood {

enum class Reduction { kMean, kSum };

struct LossConfig {
  double lambda = 0.0;
  // Reduction of the discriminative term within one sample. Batches are
  // always averaged.
  Reduction reduction = Reduction::kMean;

  void validate() const;
};

// Mean absolute difference over every element.
double joint_angle_l1(const Tensor& pred, const Tensor& truth);

// Pose tensors are [..., 3]; the mean runs over every leading index.
// `squared` switches to the squared distance.
double mpjpe(const Tensor& pred, const Tensor& truth, bool squared = false);

// K x L trajectory with K = 3J rows (x, y, z per joint) -> [L, J, 3].
Tensor rows_to_poses(const Tensor& rows);

// Graph versions over batched time-domain trajectories [B, K, L]. The per
// sample value follows `reduction`; the batch is averaged.
Var joint_angle_l1(Var pred, Var truth, Reduction reduction = Reduction::kMean);
// K = 3J rows as in rows_to_poses.
Var mpjpe(Var pred, Var truth, Reduction reduction = Reduction::kMean,
          bool squared = false);
Var discriminative_loss(Var pred, Var truth, Representation rep,
                        Reduction reduction = Reduction::kMean);

// disc - lambda * (l_g - l_l). With lambda == 0 the result is disc itself.
double combined_loss(double disc, double l_g, double l_l, const LossConfig& cfg);
// Graph version; with lambda == 0 the VLB terms are left out of the graph.
Var combined_loss(Var disc, Var l_g, Var l_l, const LossConfig& cfg);

enum class HorizonMetric {
  kAngleEuclidean,  // L2 norm over the K values at the horizon frame
  kAngleMeanAbs,    // mean |error| over the K values
  kMpjpe,           // mean joint distance, K = 3J
};

HorizonMetric default_horizon_metric(Representation rep);

// 1-based future frame index round(ms * fps / 1000).
std::size_t horizon_frame(double horizon_ms, double fps);

// pred and truth hold future frames only: K x F, or [B, K, F] averaged over B.
// Throws if a horizon maps to frame 0 or beyond F.
std::vector<double> horizon_errors(const Tensor& pred, const Tensor& truth,
                                   std::span<const double> horizons_ms,
                                   double fps, HorizonMetric metric);

}  // namespace motionood

#endif  // MOTIONOOD_LOSSES_HPP_
