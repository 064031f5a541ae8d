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

#include "motionood/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

#include "motionood/error.hpp"
#include "motionood/synthetic.hpp"

namespace motionood {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T parse_num(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T v{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("config '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v, std::function<std::string(const T&)> f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += f(v[i]);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <typename Access>
Field size_field(std::string s, std::string k, Access a) {
  return {s, k, [a](RunConfig& c) { return std::to_string(a(c)); },
          [a](RunConfig& c, const std::string& key, const std::string& v) {
            a(c) = parse_num<std::size_t>(key, v);
          }};
}

template <typename Access>
Field u64_field(std::string s, std::string k, Access a) {
  return {s, k, [a](RunConfig& c) { return std::to_string(a(c)); },
          [a](RunConfig& c, const std::string& key, const std::string& v) {
            a(c) = parse_num<std::uint64_t>(key, v);
          }};
}

template <typename Access>
Field double_field(std::string s, std::string k, Access a) {
  return {s, k, [a](RunConfig& c) { return fmt_double(a(c)); },
          [a](RunConfig& c, const std::string& key, const std::string& v) {
            a(c) = parse_num<double>(key, v);
          }};
}

template <typename Access>
Field bool_field(std::string s, std::string k, Access a) {
  return {s, k, [a](RunConfig& c) { return std::string(a(c) ? "true" : "false"); },
          [a](RunConfig& c, const std::string& key, const std::string& v) {
            a(c) = parse_bool(key, v);
          }};
}

template <typename Access>
Field string_field(std::string s, std::string k, Access a) {
  return {s, k, [a](RunConfig& c) { return std::string(a(c)); },
          [a](RunConfig& c, const std::string&, const std::string& v) { a(c) = trim(v); }};
}

template <typename Access>
Field string_list_field(std::string s, std::string k, Access a) {
  return {s, k,
          [a](RunConfig& c) {
            return join<std::string>(a(c), [](const std::string& x) { return x; });
          },
          [a](RunConfig& c, const std::string&, const std::string& v) { a(c) = split_list(v); }};
}

template <typename T, typename Access>
Field num_list_field(std::string s, std::string k, Access a) {
  return {s, k,
          [a](RunConfig& c) {
            return join<T>(a(c), [](const T& x) {
              if constexpr (std::is_floating_point_v<T>) {
                return fmt_double(x);
              } else {
                return std::to_string(x);
              }
            });
          },
          [a](RunConfig& c, const std::string& key, const std::string& v) {
            std::vector<T> out;
            for (const auto& item : split_list(v)) out.push_back(parse_num<T>(key, item));
            a(c) = out;
          }};
}

std::string metric_name(HorizonMetric m) {
  switch (m) {
    case HorizonMetric::kAngleEuclidean: return "angle-euclidean";
    case HorizonMetric::kAngleMeanAbs: return "angle-mean-abs";
    case HorizonMetric::kMpjpe: return "mpjpe";
  }
  return "angle-euclidean";
}

HorizonMetric parse_metric(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "angle-euclidean") return HorizonMetric::kAngleEuclidean;
  if (t == "angle-mean-abs") return HorizonMetric::kAngleMeanAbs;
  if (t == "mpjpe") return HorizonMetric::kMpjpe;
  throw ConfigError("config '" + key + "': unknown metric '" + v + "'");
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(string_field("run", "preset", [](RunConfig& c) -> std::string& { return c.preset; }));
    f.push_back(string_field("run", "data_root", [](RunConfig& c) -> std::string& { return c.data_root; }));
    f.push_back({"run", "output_dir", [](RunConfig& c) { return c.output_dir.string(); },
                 [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); }});
    f.push_back(num_list_field<std::uint64_t>("run", "seeds", [](RunConfig& c) -> std::vector<std::uint64_t>& { return c.seeds; }));
    f.push_back(string_field("run", "checkpoint", [](RunConfig& c) -> std::string& { return c.checkpoint; }));
    f.push_back({"run", "representation",
                 [](RunConfig& c) { return std::string(representation_name(c.representation)); },
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.representation = parse_representation(trim(v));
                   c.data.representation = c.representation;
                 }});

    f.push_back(size_field("model", "nodes", [](RunConfig& c) -> std::size_t& { return c.model.gcn.nodes; }));
    f.push_back(size_field("model", "coeffs", [](RunConfig& c) -> std::size_t& { return c.model.gcn.coeffs; }));
    f.push_back(size_field("model", "hidden", [](RunConfig& c) -> std::size_t& { return c.model.gcn.hidden; }));
    f.push_back(size_field("model", "blocks", [](RunConfig& c) -> std::size_t& { return c.model.gcn.blocks; }));
    f.push_back(double_field("model", "p_drop", [](RunConfig& c) -> double& { return c.model.gcn.dropout; }));
    f.push_back(bool_field("model", "with_vae", [](RunConfig& c) -> bool& { return c.model.with_vae; }));
    f.push_back(size_field("model", "n_z", [](RunConfig& c) -> std::size_t& { return c.model.vae.latent; }));
    f.push_back(size_field("model", "encoder_blocks", [](RunConfig& c) -> std::size_t& { return c.model.vae.encoder_blocks; }));
    f.push_back(size_field("model", "decoder_blocks", [](RunConfig& c) -> std::size_t& { return c.model.vae.decoder_blocks; }));
    f.push_back(double_field("model", "log_var_min", [](RunConfig& c) -> double& { return c.model.vae.log_var_min; }));
    f.push_back(double_field("model", "log_var_max", [](RunConfig& c) -> double& { return c.model.vae.log_var_max; }));
    f.push_back(size_field("model", "observed", [](RunConfig& c) -> std::size_t& { return c.model.observed; }));
    f.push_back(size_field("model", "future", [](RunConfig& c) -> std::size_t& { return c.model.future; }));
    f.push_back(double_field("model", "bn_eps", [](RunConfig& c) -> double& { return c.model.bn_eps; }));
    f.push_back(double_field("model", "bn_momentum", [](RunConfig& c) -> double& { return c.model.bn_momentum; }));

    f.push_back(double_field("train", "learning_rate", [](RunConfig& c) -> double& { return c.train.learning_rate; }));
    f.push_back(size_field("train", "batch_size", [](RunConfig& c) -> std::size_t& { return c.train.batch_size; }));
    f.push_back(size_field("train", "epochs", [](RunConfig& c) -> std::size_t& { return c.train.epochs; }));
    f.push_back(size_field("train", "patience", [](RunConfig& c) -> std::size_t& { return c.train.patience; }));
    f.push_back(double_field("train", "clip_norm", [](RunConfig& c) -> double& { return c.train.clip_norm; }));
    f.push_back(double_field("train", "lambda", [](RunConfig& c) -> double& { return c.train.loss.lambda; }));
    f.push_back({"train", "reduction",
                 [](RunConfig& c) { return std::string(c.train.loss.reduction == Reduction::kMean ? "mean" : "sum"); },
                 [](RunConfig& c, const std::string& key, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "mean") c.train.loss.reduction = Reduction::kMean;
                   else if (t == "sum") c.train.loss.reduction = Reduction::kSum;
                   else throw ConfigError("config '" + key + "': expected mean or sum");
                 }});

    f.push_back(num_list_field<double>("benchmark", "horizons_ms", [](RunConfig& c) -> std::vector<double>& { return c.benchmark.horizons_ms; }));
    f.push_back(double_field("benchmark", "fps", [](RunConfig& c) -> double& { return c.benchmark.fps; }));
    f.push_back(size_field("benchmark", "train_stride", [](RunConfig& c) -> std::size_t& { return c.benchmark.train_stride; }));
    f.push_back(size_field("benchmark", "test_stride", [](RunConfig& c) -> std::size_t& { return c.benchmark.test_stride; }));
    f.push_back({"benchmark", "metric", [](RunConfig& c) { return metric_name(c.benchmark.metric); },
                 [](RunConfig& c, const std::string& key, const std::string& v) {
                   c.benchmark.metric = parse_metric(key, v);
                 }});
    f.push_back(string_field("benchmark", "model_tag", [](RunConfig& c) -> std::string& { return c.benchmark.model_tag; }));
    f.push_back(bool_field("benchmark", "compare_plain", [](RunConfig& c) -> bool& { return c.compare_plain; }));
    f.push_back(double_field("benchmark", "plain_lambda", [](RunConfig& c) -> double& { return c.plain_lambda; }));
    f.push_back(double_field("benchmark", "plain_p_drop", [](RunConfig& c) -> double& { return c.plain_dropout; }));

    f.push_back(string_field("split", "id_action", [](RunConfig& c) -> std::string& { return c.split.id_action; }));
    f.push_back(string_list_field("split", "train_subjects", [](RunConfig& c) -> std::vector<std::string>& { return c.split.train_subjects; }));
    f.push_back(string_field("split", "validation_subject", [](RunConfig& c) -> std::string& { return c.split.validation_subject; }));
    f.push_back(string_field("split", "test_subject", [](RunConfig& c) -> std::string& { return c.split.test_subject; }));
    f.push_back(string_list_field("split", "ood_actions", [](RunConfig& c) -> std::vector<std::string>& { return c.split.ood_actions; }));

    f.push_back(bool_field("data", "drop_global", [](RunConfig& c) -> bool& { return c.data.drop_global; }));
    f.push_back(size_field("data", "global_columns", [](RunConfig& c) -> std::size_t& { return c.data.global_columns; }));
    f.push_back(num_list_field<std::size_t>("data", "columns", [](RunConfig& c) -> std::vector<std::size_t>& { return c.data.columns; }));
    f.push_back(size_field("data", "subsample", [](RunConfig& c) -> std::size_t& { return c.data.subsample; }));
    f.push_back(string_field("data", "extension", [](RunConfig& c) -> std::string& { return c.data.extension; }));

    f.push_back(size_field("synthetic", "classes", [](RunConfig& c) -> std::size_t& { return c.synthetic.classes; }));
    f.push_back(size_field("synthetic", "joints", [](RunConfig& c) -> std::size_t& { return c.synthetic.joints; }));
    f.push_back(size_field("synthetic", "sequences", [](RunConfig& c) -> std::size_t& { return c.synthetic.sequences; }));
    f.push_back(size_field("synthetic", "length", [](RunConfig& c) -> std::size_t& { return c.synthetic.length; }));
    f.push_back(double_field("synthetic", "fps", [](RunConfig& c) -> double& { return c.synthetic.fps; }));
    f.push_back(double_field("synthetic", "noise", [](RunConfig& c) -> double& { return c.synthetic.noise; }));
    f.push_back(u64_field("synthetic", "seed", [](RunConfig& c) -> std::uint64_t& { return c.synthetic.seed; }));

    f.push_back(double_field("classifier", "dropout", [](RunConfig& c) -> double& { return c.classifier.dropout; }));
    f.push_back(size_field("classifier", "batch_size", [](RunConfig& c) -> std::size_t& { return c.classifier.batch_size; }));
    f.push_back(double_field("classifier", "learning_rate", [](RunConfig& c) -> double& { return c.classifier.learning_rate; }));
    f.push_back(size_field("classifier", "epochs", [](RunConfig& c) -> std::size_t& { return c.classifier.epochs; }));
    f.push_back(size_field("classifier", "stride", [](RunConfig& c) -> std::size_t& { return c.classifier.stride; }));
    f.push_back(string_field("classifier", "eval_subject", [](RunConfig& c) -> std::string& { return c.classifier.eval_subject; }));
    return f;
  }();
  return table;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::stringstream ss(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw ParseError("config line " + std::to_string(line_no) + ": key outside a section");
    }
    doc.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void IniDocument::set(const std::string& section, const std::string& key,
                      std::string value) {
  auto sec = std::find_if(sections_.begin(), sections_.end(),
                          [&](const auto& s) { return s.first == section; });
  if (sec == sections_.end()) {
    sections_.push_back({section, {}});
    sec = std::prev(sections_.end());
  }
  for (auto& kv : sec->second) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  sec->second.emplace_back(key, std::move(value));
}

const std::string* IniDocument::get(const std::string& section,
                                    const std::string& key) const {
  for (const auto& s : sections_) {
    if (s.first != section) continue;
    for (const auto& kv : s.second) {
      if (kv.first == key) return &kv.second;
    }
  }
  return nullptr;
}

std::string IniDocument::to_string() const {
  std::string out;
  for (const auto& s : sections_) {
    if (!out.empty()) out += "\n";
    out += "[" + s.first + "]\n";
    for (const auto& kv : s.second) out += kv.first + " = " + kv.second + "\n";
  }
  return out;
}

std::vector<std::tuple<std::string, std::string, std::string>> IniDocument::entries() const {
  std::vector<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& s : sections_) {
    for (const auto& kv : s.second) out.emplace_back(s.first, kv.first, kv.second);
  }
  return out;
}

void set_field(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  const std::string section = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
  const std::string key = dot == std::string::npos ? dotted_key : dotted_key.substr(dot + 1);
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) {
      f.set(cfg, dotted_key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + dotted_key + "'");
}

void apply_ini(RunConfig& cfg, const IniDocument& doc) {
  for (const auto& [section, key, value] : doc.entries()) {
    set_field(cfg, section + "." + key, value);
  }
}

IniDocument to_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;
  IniDocument doc;
  for (const auto& f : fields()) doc.set(f.section, f.key, f.get(copy));
  return doc;
}

void RunConfig::validate() const {
  if (preset != "synthetic" && preset != "h36m-walking" && preset != "cmu-basketball" &&
      preset != "custom") {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  if (preset != "synthetic" && data_root.empty()) {
    throw ConfigError("preset '" + preset + "' needs a dataset root (run.data_root)");
  }
  if (!data_root.empty() && !std::filesystem::is_directory(data_root)) {
    throw ConfigError("dataset root '" + data_root + "' does not exist");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  model.validate();
  train.validate();
  benchmark.validate();
  if (!(plain_lambda >= 0.0)) throw ConfigError("plain_lambda must be >= 0");
  if (plain_dropout < 0.0 || plain_dropout >= 1.0) {
    throw ConfigError("plain_p_drop must lie in [0, 1)");
  }
  if (preset != "synthetic") split.validate();
  if (preset == "synthetic" && (synthetic.classes < 2 || synthetic.sequences < 3)) {
    throw ConfigError("synthetic preset needs >= 2 classes and >= 3 sequences per class");
  }
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  // Hardened variant defaults.
  c.train.loss.lambda = 0.003;
  c.model.gcn.dropout = 0.3;
  c.model.gcn.coeffs = 20;
  c.model.observed = 10;
  c.model.future = 10;
  c.benchmark.model_tag = "hybrid";
  if (name == "synthetic") {
    c.synthetic = SyntheticSettings{};
    c.model.gcn.nodes = c.synthetic.joints;
    c.model.gcn.hidden = 32;
    c.model.gcn.blocks = 12;
    c.model.vae.latent = 4;
    c.train.epochs = 20;
    c.train.patience = 5;
    c.benchmark.train_stride = 2;
    c.benchmark.horizons_ms = {80, 160, 320, 400, 560, 1000};
    c.seeds = {0, 1, 2};
    // A few hundred windows: the large-data classifier settings do not
    // converge in 10 epochs here.
    c.classifier.learning_rate = 1e-3;
    c.classifier.batch_size = 32;
    c.classifier.epochs = 20;
  } else if (name == "h36m-walking") {
    c.split = h36m_walking_split();
    c.model.gcn.nodes = 48;
    c.model.gcn.hidden = 256;
    c.model.vae.latent = 8;
    c.seeds = {0, 1, 2};
  } else if (name == "cmu-basketball") {
    c.split = cmu_basketball_split();
    c.model.gcn.nodes = 64;
    c.model.gcn.hidden = 256;
    c.model.vae.latent = 8;
    c.seeds = {0, 1, 2};
  } else if (name != "custom") {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

MotionDataset load_run_dataset(const RunConfig& cfg) {
  if (cfg.preset == "synthetic") {
    const auto& s = cfg.synthetic;
    MotionDataset ds = synthesize_dataset(
        banded_classes(s.classes, s.joints, s.noise, s.seed), s.sequences, s.length, s.fps);
    ds.representation = cfg.representation;
    for (auto& seq : ds.sequences) seq.representation = cfg.representation;
    return ds;
  }
  LoadOptions opts = cfg.data;
  opts.representation = cfg.representation;
  return load_dataset_dir(cfg.data_root, opts);
}

SplitSpec resolve_split(const RunConfig& cfg) {
  if (cfg.preset == "synthetic") {
    return synthetic_split(cfg.synthetic.classes, cfg.synthetic.sequences);
  }
  // Named presets seed cfg.split with their protocol, so overrides apply.
  return cfg.split;
}

}  // namespace motionood
