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

#ifndef MOTIONOOD_TRAINER_HPP_
#define MOTIONOOD_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "motionood/grad_check.hpp"
#include "motionood/hybrid_model.hpp"
#include "motionood/losses.hpp"
#include "motionood/motion_data.hpp"

namespace motionood {

struct TrainConfig {
  double learning_rate = 5e-4;  // constant, no decay
  std::size_t batch_size = 16;
  std::size_t epochs = 50;
  std::size_t patience = 10;  // epochs without validation gain; 0 disables
  double clip_norm = 1.0;
  LossConfig loss;
  Representation representation = Representation::kExpMapAngle;
  std::uint64_t seed = 0;

  void validate() const;
};

// One line of the loss log. `nll` is the negated Gaussian log-likelihood and
// `kl` the latent KL, both averaged over the batch (zero without a VAE).
struct LossLogRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double disc_loss = 0.0;
  double kl = 0.0;
  double nll = 0.0;
  double total = 0.0;
};

struct TrainStats {
  std::size_t steps = 0;
  double max_post_clip_norm = 0.0;
  double max_pre_clip_norm = 0.0;
  // Range of every clamped log-variance produced by a training forward.
  std::optional<double> min_log_var;
  std::optional<double> max_log_var;
};

struct TrainResult {
  std::vector<LossLogRow> log;
  std::vector<double> validation_error;  // one per completed epoch
  std::optional<std::size_t> best_epoch;  // set when validation data exists
  bool early_stopped = false;
  TrainStats stats;
};

struct StepInfo {
  const LossLogRow& row;
  double pre_clip_norm;
  double post_clip_norm;
};

using StepCallback = std::function<void(const StepInfo&, const HybridModel&)>;

// The training objective recorded into `graph` for one batch.
struct LossGraph {
  HybridModel::Trace trace;
  Var disc;   // time-domain error after the inverse DCT
  Var l_g;    // Gaussian log-likelihood per sample; invalid without a VAE
  Var l_l;    // latent KL per sample; invalid without a VAE
  Var total;  // disc - lambda * (l_g - l_l)
};

// inputs: [B, K, M] encoded observations; truth: [B, K, N+T] windows;
// dct_targets: [B, K, M] coefficients of the full windows.
LossGraph build_loss(const HybridModel& model, Graph& graph,
                     const BoundParameters& params, const Tensor& inputs,
                     const Tensor& truth, const Tensor& dct_targets,
                     const LossConfig& loss, Representation rep, ForwardRngs rngs);

// Central-difference check of every learnable tensor of a freshly initialised
// model under the training objective, on `batch` random windows.
GradCheckReport hybrid_grad_check(const ModelConfig& config, double lambda,
                                  std::uint64_t seed,
                                  const GradCheckOptions& options = {},
                                  std::size_t batch = 4);

// Trains in place. Each step forwards both branches, forms
// disc - lambda * (l_G - KL), backpropagates, clips the global gradient norm
// and applies Adam. With validation data the parameters of the epoch with the
// lowest validation error are restored at the end (ties keep the earlier
// epoch). A non-finite loss throws NumericError naming the epoch and step.
TrainResult train(HybridModel& model, const WindowSet& train_set,
                  const WindowSet* validation, const TrainConfig& cfg,
                  const StepCallback& on_step = {});

// Mean time-domain error over whole windows (observed and future frames)
// using the discriminative metric of `rep`.
double trajectory_error(const Tensor& pred, const Tensor& truth, Representation rep);
double evaluate_windows(const HybridModel& model, const WindowSet& windows,
                        Representation rep);

void write_loss_log(const std::vector<LossLogRow>& rows,
                    const std::filesystem::path& path);

}  // namespace motionood

#endif  // MOTIONOOD_TRAINER_HPP_
