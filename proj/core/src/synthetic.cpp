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

#include "motionood/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "motionood/error.hpp"
#include "motionood/parameters.hpp"

namespace motionood {

void SyntheticClassSpec::validate() const {
  if (frequency_hz.empty()) throw ConfigError("synthetic class '" + name + "' has no joints");
  if (amplitude.size() != joints() || phase.size() != joints()) {
    throw ConfigError("synthetic class '" + name + "': per-joint lists differ in length");
  }
  for (double f : frequency_hz) {
    if (!(f > 0.0)) throw ConfigError("synthetic class '" + name + "': frequency must be > 0");
  }
  if (!(noise_std >= 0.0)) throw ConfigError("synthetic class '" + name + "': noise must be >= 0");
}

MotionDataset synthesize_dataset(const std::vector<SyntheticClassSpec>& specs,
                                 std::size_t sequences_per_class,
                                 std::size_t length, double fps) {
  if (specs.size() < 2) throw ConfigError("synthetic dataset needs >= 2 classes");
  if (sequences_per_class == 0 || length == 0 || !(fps > 0.0)) {
    throw ConfigError("synthetic dataset: sequence count, length and fps must be positive");
  }
  const std::size_t k = specs.front().joints();
  MotionDataset ds;
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.joints() != k) throw ConfigError("synthetic classes disagree on K");
    std::mt19937_64 rng(derive_seed(spec.seed, 11));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> start(0.0, 10.0);
    for (std::size_t s = 0; s < sequences_per_class; ++s) {
      const double t0 = start(rng);
      MotionSequence seq;
      seq.action = spec.name;
      seq.subject = "s" + std::to_string(s);
      seq.frames = Tensor({length, k});
      for (std::size_t n = 0; n < length; ++n) {
        const double t = t0 + double(n) / fps;
        for (std::size_t j = 0; j < k; ++j) {
          double v = spec.amplitude[j] *
                     std::sin(2.0 * std::numbers::pi * spec.frequency_hz[j] * t +
                              spec.phase[j]);
          if (spec.noise_std > 0.0) v += spec.noise_std * noise(rng);
          seq.frames.at(n, j) = v;
        }
      }
      ds.sequences.push_back(std::move(seq));
    }
  }
  return ds;
}

std::vector<SyntheticClassSpec> banded_classes(std::size_t classes,
                                               std::size_t joints,
                                               double noise_std,
                                               std::uint64_t seed) {
  if (classes < 2 || joints == 0) throw ConfigError("banded_classes: need >= 2 classes and >= 1 joint");
  std::mt19937_64 rng(derive_seed(seed, 12));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SyntheticClassSpec> out;
  for (std::size_t c = 0; c < classes; ++c) {
    SyntheticClassSpec spec;
    spec.name = "class" + std::to_string(c);
    spec.noise_std = noise_std;
    spec.seed = derive_seed(seed, 100 + c);
    for (std::size_t j = 0; j < joints; ++j) {
      spec.frequency_hz.push_back(0.5 + double(c) + 0.5 * unit(rng));
      spec.amplitude.push_back(0.2 + 0.8 * unit(rng));
      spec.phase.push_back(2.0 * std::numbers::pi * unit(rng));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

SplitSpec synthetic_split(std::size_t classes, std::size_t subjects) {
  if (classes < 2) throw ConfigError("synthetic split needs >= 2 classes");
  if (subjects < 3) throw ConfigError("synthetic split needs >= 3 subjects");
  SplitSpec s;
  s.id_action = "class0";
  for (std::size_t i = 0; i + 2 < subjects; ++i) {
    s.train_subjects.push_back("s" + std::to_string(i));
  }
  s.validation_subject = "s" + std::to_string(subjects - 2);
  s.test_subject = "s" + std::to_string(subjects - 1);
  for (std::size_t c = 1; c < classes; ++c) s.ood_actions.push_back("class" + std::to_string(c));
  return s;
}

}  // namespace motionood
