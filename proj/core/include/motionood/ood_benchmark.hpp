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

#ifndef MOTIONOOD_OOD_BENCHMARK_HPP_
#define MOTIONOOD_OOD_BENCHMARK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "motionood/hybrid_model.hpp"
#include "motionood/losses.hpp"
#include "motionood/motion_data.hpp"
#include "motionood/trainer.hpp"

namespace motionood {

inline constexpr const char* kOodAverageAction = "ood_average";

struct BenchmarkConfig {
  std::string model_tag = "model";
  std::vector<double> horizons_ms = {80, 160, 320, 400};
  double fps = 25.0;
  std::size_t train_stride = 1;
  std::size_t test_stride = 0;  // 0: T, so test futures do not overlap
  HorizonMetric metric = HorizonMetric::kAngleEuclidean;

  void validate() const;
};

struct BenchmarkResult {
  std::string model;
  std::string action;
  double horizon_ms = 0.0;
  double value = 0.0;
  std::uint64_t seed = 0;
  Representation representation = Representation::kExpMapAngle;
};

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult training;
};

struct BenchmarkRun {
  // Per seed: the ID action, then every OoD action in split order, each at
  // every horizon.
  std::vector<BenchmarkResult> rows;
  // Per seed and horizon: unweighted mean over the OoD actions.
  std::vector<BenchmarkResult> ood_average;
  std::vector<SeedFailure> failures;
  std::vector<SeedRun> seeds;
};

// Trains one model per seed on the ID windows and evaluates every action.
// A seed that throws is recorded in `failures`; the other seeds still run.
BenchmarkRun run_benchmark(const OodSplit& split, const ModelConfig& model,
                           const TrainConfig& train, const BenchmarkConfig& bench,
                           const std::vector<std::uint64_t>& seeds);

struct RecursiveOutput {
  Tensor frames;  // [B, K, total_future]
  std::size_t passes = 0;
};

// Feeds the model its own predictions: each pass encodes the latest N frames,
// predicts T future frames and appends them to the history.
RecursiveOutput recursive_predict(const HybridModel& model, const Tensor& history,
                                  std::size_t total_future);

struct AggregateRow {
  std::string model;
  std::string action;
  double horizon_ms = 0.0;
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator; 0 for a single seed
  std::size_t n_seeds = 0;
  bool single_seed = false;
};

// Groups by (model, action, horizon) in first-appearance order.
std::vector<AggregateRow> aggregate_seeds(const std::vector<BenchmarkResult>& results);

}  // namespace motionood

#endif  // MOTIONOOD_OOD_BENCHMARK_HPP_
