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

#ifndef MOTIONOOD_RUN_CONFIG_HPP_
#define MOTIONOOD_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "motionood/classifier.hpp"
#include "motionood/hybrid_model.hpp"
#include "motionood/motion_data.hpp"
#include "motionood/ood_benchmark.hpp"
#include "motionood/trainer.hpp"

namespace motionood {

// Plain-text "key = value" lines under "[section]" headers. '#' and ';' start
// comments. Sections and keys keep file order.
class IniDocument {
 public:
  static IniDocument parse(const std::string& text);
  static IniDocument load(const std::filesystem::path& path);

  void set(const std::string& section, const std::string& key, std::string value);
  const std::string* get(const std::string& section, const std::string& key) const;
  std::string to_string() const;

  // (section, key, value) in order.
  std::vector<std::tuple<std::string, std::string, std::string>> entries() const;

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
      sections_;
};

struct SyntheticSettings {
  std::size_t classes = 4;
  std::size_t joints = 9;
  std::size_t sequences = 5;  // per class; also the subject count
  std::size_t length = 200;
  double fps = 25.0;
  double noise = 0.02;
  std::uint64_t seed = 1;
};

struct ClassifierSettings {
  double dropout = 0.5;
  std::size_t batch_size = 2048;
  double learning_rate = 1e-5;
  std::size_t epochs = 10;
  std::size_t stride = 0;  // 0: T
  // Subject whose windows form the test set; empty: the split's test subject.
  std::string eval_subject;
};

struct RunConfig {
  std::string preset = "synthetic";  // synthetic | h36m-walking | cmu-basketball | custom
  std::string data_root;
  std::filesystem::path output_dir = "out";
  std::vector<std::uint64_t> seeds = {0};
  std::string checkpoint;  // input checkpoint for `latents`
  Representation representation = Representation::kExpMapAngle;

  ModelConfig model;
  TrainConfig train;
  BenchmarkConfig benchmark;
  // Reference variant run next to the main model by `benchmark`.
  bool compare_plain = true;
  double plain_lambda = 0.0;
  double plain_dropout = 0.5;

  SplitSpec split;  // ignored by the synthetic preset
  LoadOptions data;
  SyntheticSettings synthetic;
  ClassifierSettings classifier;

  void validate() const;
};

RunConfig preset_config(const std::string& name);

// Dataset named by the config: generated for the synthetic preset, read from
// data_root otherwise.
MotionDataset load_run_dataset(const RunConfig& cfg);
// Synthetic runs derive the split from the synthetic settings; every other
// preset uses cfg.split, which the named presets pre-fill.
SplitSpec resolve_split(const RunConfig& cfg);

// Sets one field addressed as "section.key". Throws ConfigError on an
// unknown key or a malformed value.
void set_field(RunConfig& cfg, const std::string& dotted_key, const std::string& value);
// Applies every entry of the document.
void apply_ini(RunConfig& cfg, const IniDocument& doc);
// Every field, so that apply_ini(preset, to_ini(cfg)) reproduces cfg.
IniDocument to_ini(const RunConfig& cfg);

}  // namespace motionood

#endif  // MOTIONOOD_RUN_CONFIG_HPP_
