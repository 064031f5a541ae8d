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

#ifndef MOTIONOOD_MOTION_DATA_HPP_
#define MOTIONOOD_MOTION_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "motionood/dct.hpp"
#include "motionood/representation.hpp"
#include "motionood/tensor.hpp"

namespace motionood {

struct MotionSequence {
  std::string action;
  std::string subject;
  Tensor frames;  // F x K, one row per frame
  Representation representation = Representation::kExpMapAngle;

  std::size_t frame_count() const { return frames.dim(0); }
  std::size_t joints() const { return frames.dim(1); }
};

// One frame per line, comma-separated decimals. Blank lines are skipped.
// Errors name the offending line.
MotionSequence load_motion_text(const std::filesystem::path& path,
                                Representation representation);
// Values are written with 17 significant digits so a reload is exact.
void save_motion_text(const MotionSequence& seq, const std::filesystem::path& path);

// Windows start at 0, stride, 2*stride, ...; each is returned joint-major
// (K x (N+T)) as the DCT stage expects.
std::vector<TrajectoryWindow> window_samples(const MotionSequence& seq,
                                             std::size_t observed,
                                             std::size_t future,
                                             std::size_t stride);
std::size_t window_count(std::size_t length, std::size_t observed,
                         std::size_t future, std::size_t stride);

struct MotionDataset {
  Representation representation = Representation::kExpMapAngle;
  std::vector<MotionSequence> sequences;

  // Throws if sequences disagree on K or representation.
  std::size_t joints() const;
  std::vector<std::string> actions() const;   // first-appearance order
  std::vector<std::string> subjects() const;  // first-appearance order
};

struct LoadOptions {
  Representation representation = Representation::kExpMapAngle;
  // Drops the leading `global_columns` channels (global translation and
  // rotation) when set.
  bool drop_global = false;
  std::size_t global_columns = 6;
  // Optional explicit column subset, applied after drop_global.
  std::vector<std::size_t> columns;
  // Keeps every `subsample`-th frame.
  std::size_t subsample = 1;
  std::string extension = ".txt";
};

// Reads <root>/<subject>/<action>_<trial><ext>. The action is the file stem
// up to its last underscore. Files are visited in sorted order.
MotionDataset load_dataset_dir(const std::filesystem::path& root,
                               const LoadOptions& options);

struct SplitSpec {
  std::string id_action;
  std::vector<std::string> train_subjects;
  std::string validation_subject;  // empty: no validation partition
  std::string test_subject;
  std::vector<std::string> ood_actions;

  void validate() const;
};

struct OodSplit {
  std::vector<MotionSequence> train;
  std::vector<MotionSequence> validation;
  std::vector<MotionSequence> test_id;
  // In SplitSpec::ood_actions order.
  std::vector<std::pair<std::string, std::vector<MotionSequence>>> test_ood;
};

OodSplit make_ood_split(const MotionDataset& dataset, const SplitSpec& spec);

// Windows stacked into one tensor, with per-window labels.
struct WindowSet {
  Tensor data;  // [W, K, N+T]
  std::size_t observed = 0;
  std::vector<std::string> labels;
  std::vector<std::string> ids;  // subject/action/sequence#/offset

  std::size_t size() const { return data.rank() == 3 ? data.dim(0) : 0; }
  std::size_t joints() const { return data.dim(1); }
  std::size_t length() const { return data.dim(2); }
  std::size_t future() const { return length() - observed; }

  Tensor observed_part() const;  // [W, K, N]
  Tensor future_part() const;    // [W, K, T]
  WindowSet subset(const std::vector<std::size_t>& indices) const;
};

// Sequences shorter than N+T contribute no windows.
WindowSet make_windows(const std::vector<MotionSequence>& sequences,
                       std::size_t observed, std::size_t future,
                       std::size_t stride);

SplitSpec h36m_walking_split();
SplitSpec cmu_basketball_split();

}  // namespace motionood

#endif  // MOTIONOOD_MOTION_DATA_HPP_
