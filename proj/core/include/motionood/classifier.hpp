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

#ifndef MOTIONOOD_CLASSIFIER_HPP_
#define MOTIONOOD_CLASSIFIER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "motionood/motion_data.hpp"
#include "motionood/parameters.hpp"

namespace motionood {

// Fully connected action classifier over flattened DCT inputs:
// input -> 1024 -> 512 -> 128 -> classes, ReLU and dropout after each hidden
// layer, cross-entropy on the logits.
struct ClassifierConfig {
  std::size_t input_dim = 0;
  static constexpr std::array<std::size_t, 3> kHidden = {1024, 512, 128};
  std::size_t classes = 0;
  double dropout = 0.5;
  std::size_t batch_size = 2048;
  double learning_rate = 1e-5;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledWindows {
  Tensor inputs;  // [S, K*M]
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return labels.size(); }
};

// Replicate-pads the observed part of every window and keeps the first
// `coeffs` DCT coefficients per joint. With empty `class_names` the classes
// are the window labels in first-appearance order.
LabeledWindows encode_for_classifier(const WindowSet& windows, std::size_t coeffs,
                                     std::vector<std::string> class_names = {});

class Classifier {
 public:
  explicit Classifier(const ClassifierConfig& config);

  const ClassifierConfig& config() const { return config_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  // Records logits [B, classes]. Dropout is active when `rng` is non-null.
  Var logits(Graph& graph, const BoundParameters& params, Var inputs,
             std::mt19937_64* rng) const;
  // Deterministic dropout-off forward.
  Tensor logits(const Tensor& inputs) const;
  std::vector<std::size_t> predict(const Tensor& inputs) const;

 private:
  ClassifierConfig config_;
  ParameterSet params_;
  std::vector<std::size_t> weights_;
  std::vector<std::size_t> biases_;
};

struct ClassifierTrainLog {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
  double train_accuracy = 0.0;
};

// Throws if fewer than two classes are present or a class has no samples.
Classifier train_classifier(const LabeledWindows& data, const ClassifierConfig& cfg,
                            ClassifierTrainLog* log = nullptr);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

// Entry (i, j): samples of true class i predicted as j.
ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& truth,
                                 const std::vector<std::size_t>& predicted,
                                 std::size_t classes);
ConfusionMatrix confusion_matrix(const Classifier& clf, const LabeledWindows& test);

struct ClassMetrics {
  std::optional<double> precision;  // unset when nothing was predicted as the class
  std::optional<double> recall;     // unset when the class has no samples
};

std::vector<ClassMetrics> precision_recall(const ConfusionMatrix& m);

void write_confusion_csv(const ConfusionMatrix& m,
                         const std::vector<std::string>& class_names,
                         const std::filesystem::path& path);

}  // namespace motionood

#endif  // MOTIONOOD_CLASSIFIER_HPP_
