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

#ifndef MOTIONOOD_SYNTHETIC_HPP_
#define MOTIONOOD_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "motionood/motion_data.hpp"

namespace motionood {

// One synthetic action: per-joint sinusoids plus Gaussian noise,
//   x_k(t) = amplitude_k * sin(2 pi frequency_k (t + t0) + phase_k) + noise,
// with a random start time t0 per sequence.
struct SyntheticClassSpec {
  std::string name;
  std::vector<double> frequency_hz;
  std::vector<double> amplitude;
  std::vector<double> phase;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  std::size_t joints() const { return frequency_hz.size(); }
  void validate() const;
};

// Sequence i of every class belongs to subject "s<i>".
MotionDataset synthesize_dataset(const std::vector<SyntheticClassSpec>& specs,
                                 std::size_t sequences_per_class,
                                 std::size_t length, double fps);

// `classes` actions named "class0", "class1", ... whose joint frequencies lie
// in disjoint bands [0.5 + c, 1.0 + c] Hz. Amplitudes and phases are drawn
// from `seed`.
std::vector<SyntheticClassSpec> banded_classes(std::size_t classes,
                                               std::size_t joints,
                                               double noise_std,
                                               std::uint64_t seed);

// ID = class0, OoD = the remaining classes. With S subjects: s0..s(S-3)
// train, s(S-2) validation, s(S-1) test. Needs S >= 3.
SplitSpec synthetic_split(std::size_t classes, std::size_t subjects);

}  // namespace motionood

#endif  // MOTIONOOD_SYNTHETIC_HPP_
