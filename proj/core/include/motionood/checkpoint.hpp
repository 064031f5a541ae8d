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

#ifndef MOTIONOOD_CHECKPOINT_HPP_
#define MOTIONOOD_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>

#include "motionood/hybrid_model.hpp"

namespace motionood {

// Binary layout, little-endian:
//
//   "MOODCKPT"  u32 version  u32 flags (bit 0: generative tensors present)
//   model configuration (u64 / f64 fields in a fixed order)
//   u64 tensor count, then per tensor:
//     u32 name length, name bytes, u8 group, u8 kind, u32 rank, u64 dims[rank],
//     f64 values[product(dims)] in row-major order
//   u64 FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointLoadOptions {
  // Skips the generative tensors and returns a prediction-only model.
  bool prediction_only = false;
};

void save_checkpoint(const HybridModel& model, const std::filesystem::path& path);

// Throws CheckpointError on a bad magic, version mismatch, truncation or
// checksum failure. Nothing is returned unless the whole file validates.
HybridModel load_checkpoint(const std::filesystem::path& path,
                            CheckpointLoadOptions options = {});

}  // namespace motionood

#endif  // MOTIONOOD_CHECKPOINT_HPP_
