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

#ifndef MOTIONOOD_LATENTS_HPP_
#define MOTIONOOD_LATENTS_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "motionood/hybrid_model.hpp"
#include "motionood/motion_data.hpp"

namespace motionood {

struct LatentRecord {
  std::string id;
  std::string label;
  std::vector<double> z;  // flattened latent mean, length K * n_z
};

// Latent means (no sampling) of every window, in window order.
std::vector<LatentRecord> extract_latents(const HybridModel& model,
                                          const WindowSet& windows);

struct ProjectedPoint {
  std::string id;
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct Projection {
  std::vector<ProjectedPoint> points;
  std::array<double, 2> component_variance{};  // descending
  double total_variance = 0.0;                 // trace of the input covariance
  std::array<std::vector<double>, 2> components;
};

// Mean-centred projection onto the top two principal components. Each
// component's sign is fixed so its first nonzero loading is positive.
Projection project_pca_2d(const std::vector<LatentRecord>& records);

// id,label,z_0,...,z_{D-1}
void export_latents_csv(const std::vector<LatentRecord>& records,
                        const std::filesystem::path& path);
std::vector<LatentRecord> load_latents_csv(const std::filesystem::path& path);
// id,label,x,y
void export_projection_csv(const Projection& projection,
                           const std::filesystem::path& path);

}  // namespace motionood

#endif  // MOTIONOOD_LATENTS_HPP_
