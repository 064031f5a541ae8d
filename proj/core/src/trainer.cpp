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

#include "motionood/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "motionood/adam.hpp"
#include "motionood/dct.hpp"
#include "motionood/error.hpp"

namespace motionood {
namespace {

Tensor gather(const Tensor& t, const std::vector<std::size_t>& rows) {
  Shape s = t.shape();
  const std::size_t per = t.size() / s[0];
  s[0] = rows.size();
  Tensor out(s);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(t.data() + rows[i] * per, per, out.data() + i * per);
  }
  return out;
}

void track_log_var(const Tensor& lv, const VaeConfig& vae, TrainStats& stats) {
  for (double v : lv.values()) {
    if (v < vae.log_var_min || v > vae.log_var_max) {
      throw NumericError("log-variance " + std::to_string(v) +
                         " escaped its clamp range");
    }
    stats.min_log_var = std::min(stats.min_log_var.value_or(v), v);
    stats.max_log_var = std::max(stats.max_log_var.value_or(v), v);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (epochs == 0) throw ConfigError("epoch count must be >= 1");
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be > 0");
  loss.validate();
}

double trajectory_error(const Tensor& pred, const Tensor& truth, Representation rep) {
  if (rep == Representation::kExpMapAngle) return joint_angle_l1(pred, truth);
  if (pred.shape() != truth.shape() || pred.rank() != 3) {
    throw ShapeError("trajectory_error: expected matching [W, K, L] tensors");
  }
  const std::size_t w = pred.dim(0), k = pred.dim(1), l = pred.dim(2);
  double acc = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    Tensor a({k, l}, std::vector<double>(pred.data() + i * k * l, pred.data() + (i + 1) * k * l));
    Tensor b({k, l}, std::vector<double>(truth.data() + i * k * l, truth.data() + (i + 1) * k * l));
    acc += mpjpe(rows_to_poses(a), rows_to_poses(b));
  }
  return acc / double(w);
}

double evaluate_windows(const HybridModel& model, const WindowSet& windows,
                        Representation rep) {
  if (windows.size() == 0) throw UsageError("evaluate_windows: no windows");
  return trajectory_error(model.predict(windows.observed_part()), windows.data, rep);
}

LossGraph build_loss(const HybridModel& model, Graph& graph,
                     const BoundParameters& params, const Tensor& inputs,
                     const Tensor& truth, const Tensor& dct_targets,
                     const LossConfig& loss, Representation rep, ForwardRngs rngs) {
  const ModelConfig& mc = model.config();
  const double batch = double(inputs.dim(0));
  LossGraph lg;
  lg.trace = model.build(graph, params, graph.constant(inputs), Mode::kTrain, rngs,
                         /*generative=*/true);
  Var pred = matmul(lg.trace.prediction,
                    graph.constant(dct_inverse_matrix(mc.window(), mc.gcn.coeffs)));
  lg.disc = discriminative_loss(pred, graph.constant(truth), rep, loss.reduction);
  lg.total = lg.disc;
  if (lg.trace.latent) {
    lg.l_g = scale(gaussian_log_likelihood(*lg.trace.decoded, graph.constant(dct_targets)),
                   1.0 / batch);
    lg.l_l = scale(kl_divergence(*lg.trace.latent), 1.0 / batch);
    lg.total = combined_loss(lg.disc, lg.l_g, lg.l_l, loss);
  }
  return lg;
}

GradCheckReport hybrid_grad_check(const ModelConfig& config, double lambda,
                                  std::uint64_t seed, const GradCheckOptions& options,
                                  std::size_t batch) {
  HybridModel model(config, seed);
  std::mt19937_64 data_rng(derive_seed(seed, 31));
  const std::size_t k = config.gcn.nodes, len = config.window(), m = config.gcn.coeffs;
  const Tensor windows = normal_tensor({batch, k, len}, data_rng);
  Tensor observed({batch, k, config.observed});
  for (std::size_t i = 0; i < batch * k; ++i) {
    std::copy_n(windows.data() + i * len, config.observed, observed.data() + i * config.observed);
  }
  std::mt19937_64 dropout_rng(derive_seed(seed, 32));
  std::mt19937_64 generative_rng(derive_seed(seed, 33));
  LossConfig loss;
  loss.lambda = lambda;

  Graph graph;
  BoundParameters bound(graph, model.parameters());
  const LossGraph lg = build_loss(
      model, graph, bound, encode_observed(observed, config.future, m), windows,
      apply_last_axis(windows, dct_forward_matrix(len, m)), loss,
      Representation::kExpMapAngle, {&dropout_rng, &generative_rng});
  std::vector<NamedLeaf> leaves;
  const ParameterSet& set = model.parameters();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].kind == ParamKind::kLearnable) leaves.push_back({set[i].name, bound[i]});
  }
  return grad_check(graph, lg.total, leaves, options);
}

TrainResult train(HybridModel& model, const WindowSet& train_set,
                  const WindowSet* validation, const TrainConfig& cfg,
                  const StepCallback& on_step) {
  cfg.validate();
  if (train_set.size() == 0) throw UsageError("train: training set is empty");
  const ModelConfig& mc = model.config();
  if (train_set.joints() != mc.gcn.nodes || train_set.observed != mc.observed ||
      train_set.future() != mc.future) {
    throw ShapeError("train: windows do not match the model's K, N, T");
  }
  const bool use_validation = validation != nullptr && validation->size() > 0;

  const std::size_t m = mc.gcn.coeffs, len = mc.window();
  const Tensor inputs = encode_observed(train_set.observed_part(), mc.future, m);
  const Tensor& truth = train_set.data;
  const Tensor dct_targets = apply_last_axis(truth, dct_forward_matrix(len, m));

  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, 3));
  std::mt19937_64 generative_rng(derive_seed(cfg.seed, 4));
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 5));
  AdamState adam = AdamState::for_parameters(model.parameters());

  TrainResult result;
  std::optional<ParameterSet> best;
  double best_error = 0.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::vector<std::size_t> rows(order.begin() + begin, order.begin() + end);

      Graph graph;
      BoundParameters bound(graph, model.parameters());
      const LossGraph lg = build_loss(model, graph, bound, gather(inputs, rows),
                                      gather(truth, rows), gather(dct_targets, rows),
                                      cfg.loss, cfg.representation,
                                      {&dropout_rng, &generative_rng});
      const HybridModel::Trace& trace = lg.trace;

      LossLogRow row;
      row.epoch = epoch;
      row.step = result.stats.steps;
      try {
        if (trace.latent) {
          row.kl = graph.evaluate(lg.l_l).item();
          row.nll = -graph.evaluate(lg.l_g).item();
          track_log_var(graph.value(trace.latent->log_var), mc.vae, result.stats);
          track_log_var(graph.value(trace.decoded->log_var), mc.vae, result.stats);
        }
        row.disc_loss = graph.evaluate(lg.disc).item();
        row.total = graph.evaluate(lg.total).item();
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(row.step) + ": " + e.what());
      }
      if (!std::isfinite(row.total)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(row.step) +
                           ": non-finite loss");
      }

      graph.backward(lg.total);
      Gradients grads = bound.gradients();
      const double pre = clip_gradients(grads, cfg.clip_norm);
      const double post = global_norm(grads);
      if (post > cfg.clip_norm + 1e-12) {
        throw NumericError("gradient norm " + std::to_string(post) +
                           " exceeds the clip bound after clipping");
      }
      result.stats.max_pre_clip_norm = std::max(result.stats.max_pre_clip_norm, pre);
      result.stats.max_post_clip_norm = std::max(result.stats.max_post_clip_norm, post);
      adam_step(model.parameters(), grads, adam, cfg.learning_rate);
      model.update_running_stats(graph, trace);

      ++result.stats.steps;
      result.log.push_back(row);
      if (on_step) on_step(StepInfo{result.log.back(), pre, post}, model);
    }

    if (use_validation) {
      const double err = evaluate_windows(model, *validation, cfg.representation);
      result.validation_error.push_back(err);
      if (!best || err < best_error) {
        best = model.parameters();
        best_error = err;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }
  if (best) model.parameters() = *best;
  return result;
}

void write_loss_log(const std::vector<LossLogRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "epoch,step,disc_loss,kl,nll,total\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", r.epoch,
                  r.step, r.disc_loss, r.kl, r.nll, r.total);
    out << buf;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace motionood
