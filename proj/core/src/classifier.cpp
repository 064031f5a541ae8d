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

#include "motionood/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "motionood/adam.hpp"
#include "motionood/error.hpp"
#include "motionood/hybrid_model.hpp"

namespace motionood {
namespace {

constexpr std::size_t kEvalChunk = 1024;

Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& rows) {
  const std::size_t per = t.dim(1);
  Tensor out({rows.size(), per});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(t.data() + rows[i] * per, per, out.data() + i * per);
  }
  return out;
}

}  // namespace

void ClassifierConfig::validate() const {
  if (input_dim == 0) throw ConfigError("classifier: input dimension must be positive");
  if (classes < 2) throw ConfigError("classifier: needs at least two classes");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("classifier: dropout must lie in [0, 1)");
  if (batch_size == 0) throw ConfigError("classifier: batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("classifier: learning rate must be > 0");
  if (epochs == 0) throw ConfigError("classifier: epoch count must be >= 1");
}

LabeledWindows encode_for_classifier(const WindowSet& windows, std::size_t coeffs,
                                     std::vector<std::string> class_names) {
  if (windows.size() == 0) throw UsageError("classifier: no windows");
  if (class_names.empty()) {
    for (const auto& l : windows.labels) {
      if (std::find(class_names.begin(), class_names.end(), l) == class_names.end()) {
        class_names.push_back(l);
      }
    }
  }
  LabeledWindows out;
  const Tensor enc = encode_observed(windows.observed_part(), windows.future(), coeffs);
  out.inputs = enc.reshaped({windows.size(), windows.joints() * coeffs});
  for (const auto& l : windows.labels) {
    const auto it = std::find(class_names.begin(), class_names.end(), l);
    if (it == class_names.end()) throw UsageError("classifier: unknown label '" + l + "'");
    out.labels.push_back(std::size_t(it - class_names.begin()));
  }
  out.class_names = std::move(class_names);
  return out;
}

Classifier::Classifier(const ClassifierConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(derive_seed(config_.seed, 21));
  std::vector<std::size_t> dims = {config_.input_dim};
  dims.insert(dims.end(), ClassifierConfig::kHidden.begin(), ClassifierConfig::kHidden.end());
  dims.push_back(config_.classes);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::string prefix = "clf.fc" + std::to_string(i);
    weights_.push_back(params_.add(
        prefix + ".W",
        uniform_tensor({dims[i], dims[i + 1]}, 1.0 / std::sqrt(double(dims[i])), rng),
        ParamGroup::kDiscriminative));
    biases_.push_back(params_.add(prefix + ".b", Tensor({dims[i + 1]}, 0.0),
                                  ParamGroup::kDiscriminative));
  }
}

Var Classifier::logits(Graph& graph, const BoundParameters& params, Var inputs,
                       std::mt19937_64* rng) const {
  if (inputs.shape().size() != 2 || inputs.shape()[1] != config_.input_dim) {
    throw ShapeError("classifier: expected [B, " + std::to_string(config_.input_dim) +
                     "] inputs, got " + shape_string(inputs.shape()));
  }
  Var y = inputs;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    y = add_bias(matmul(y, params[weights_[i]]), params[biases_[i]]);
    if (i + 1 == weights_.size()) break;
    y = relu(y);
    if (rng != nullptr && config_.dropout > 0.0) {
      y = dropout(y, graph.constant(dropout_mask(y.shape(), config_.dropout, *rng)));
    }
  }
  return y;
}

Tensor Classifier::logits(const Tensor& inputs) const {
  const std::size_t n = inputs.dim(0);
  Tensor out({n, config_.classes});
  for (std::size_t begin = 0; begin < n; begin += kEvalChunk) {
    const std::size_t end = std::min(n, begin + kEvalChunk);
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    Graph graph;
    BoundParameters bound(graph, params_, false);
    const Tensor& y = graph.evaluate(
        logits(graph, bound, graph.constant(gather_rows(inputs, rows)), nullptr));
    std::copy(y.values().begin(), y.values().end(), out.data() + begin * config_.classes);
  }
  return out;
}

std::vector<std::size_t> Classifier::predict(const Tensor& inputs) const {
  const Tensor z = logits(inputs);
  std::vector<std::size_t> out(z.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* row = z.data() + i * z.dim(1);
    out[i] = std::size_t(std::max_element(row, row + z.dim(1)) - row);
  }
  return out;
}

Classifier train_classifier(const LabeledWindows& data, const ClassifierConfig& cfg,
                            ClassifierTrainLog* log) {
  cfg.validate();
  if (data.size() == 0 || data.inputs.dim(0) != data.size()) {
    throw UsageError("classifier: inputs and labels disagree");
  }
  std::vector<std::size_t> support(cfg.classes, 0);
  for (std::size_t l : data.labels) {
    if (l >= cfg.classes) throw UsageError("classifier: label out of range");
    ++support[l];
  }
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    if (support[c] == 0) {
      const std::string name = c < data.class_names.size() ? data.class_names[c]
                                                           : std::to_string(c);
      throw UsageError("classifier: class '" + name + "' has no samples");
    }
  }

  Classifier clf(cfg);
  AdamState adam = AdamState::for_parameters(clf.parameters());
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 22));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, 23));
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::vector<std::size_t> rows(order.begin() + begin, order.begin() + end);
      Tensor onehot({rows.size(), cfg.classes}, 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) onehot.at(i, data.labels[rows[i]]) = 1.0;

      Graph graph;
      BoundParameters bound(graph, clf.parameters());
      Var z = clf.logits(graph, bound, graph.constant(gather_rows(data.inputs, rows)),
                         &dropout_rng);
      Var loss = scale(sum(graph.constant(onehot) * log_softmax(z)),
                       -1.0 / double(rows.size()));
      loss_sum += graph.evaluate(loss).item() * double(rows.size());
      graph.backward(loss);
      adam_step(clf.parameters(), bound.gradients(), adam, cfg.learning_rate);
    }
    if (log) log->epoch_loss.push_back(loss_sum / double(data.size()));
  }
  if (log) {
    const auto pred = clf.predict(data.inputs);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[i];
    log->train_accuracy = double(hits) / double(pred.size());
  }
  return clf;
}

ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& truth,
                                 const std::vector<std::size_t>& predicted,
                                 std::size_t classes) {
  if (truth.size() != predicted.size()) {
    throw UsageError("confusion_matrix: label and prediction counts differ");
  }
  ConfusionMatrix m(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes || predicted[i] >= classes) {
      throw UsageError("confusion_matrix: class index out of range");
    }
    ++m[truth[i]][predicted[i]];
  }
  return m;
}

ConfusionMatrix confusion_matrix(const Classifier& clf, const LabeledWindows& test) {
  return confusion_matrix(test.labels, clf.predict(test.inputs), clf.config().classes);
}

std::vector<ClassMetrics> precision_recall(const ConfusionMatrix& m) {
  const std::size_t c = m.size();
  for (const auto& row : m) {
    if (row.size() != c) throw ShapeError("precision_recall: matrix is not square");
  }
  std::vector<ClassMetrics> out(c);
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t col = 0, row = 0;
    for (std::size_t i = 0; i < c; ++i) {
      col += m[i][k];
      row += m[k][i];
    }
    if (col > 0) out[k].precision = double(m[k][k]) / double(col);
    if (row > 0) out[k].recall = double(m[k][k]) / double(row);
  }
  return out;
}

void write_confusion_csv(const ConfusionMatrix& m,
                         const std::vector<std::string>& class_names,
                         const std::filesystem::path& path) {
  if (class_names.size() != m.size()) {
    throw UsageError("write_confusion_csv: class name count does not match matrix");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "true\\predicted";
  for (const auto& n : class_names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << class_names[i];
    for (std::size_t v : m[i]) out << ',' << v;
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace motionood
