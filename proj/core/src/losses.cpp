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

#include "motionood/losses.hpp"

#include <cmath>
#include <string>

#include "motionood/error.hpp"

namespace motionood {
namespace {

void check_same(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape " + shape_string(a) + " vs " +
                     shape_string(b));
  }
}

// Per-sample reduction of a [B, ...] elementwise error tensor.
Var reduce(Var elementwise, Reduction reduction) {
  const Shape& s = elementwise.shape();
  const double batch = double(s[0]);
  const double per_sample = double(shape_size(s)) / batch;
  const double denom = reduction == Reduction::kMean ? batch * per_sample : batch;
  return scale(sum(elementwise), 1.0 / denom);
}

void check_batched(const Shape& s, const char* what) {
  if (s.size() != 3 || s[0] == 0) {
    throw ShapeError(std::string(what) + ": expected [B, K, L], got " +
                     shape_string(s));
  }
}

}  // namespace

std::string_view representation_name(Representation r) {
  return r == Representation::kExpMapAngle ? "exp-map-angle" : "cartesian-3d";
}

Representation parse_representation(std::string_view text) {
  if (text == "exp-map-angle" || text == "angle") return Representation::kExpMapAngle;
  if (text == "cartesian-3d" || text == "3d") return Representation::kCartesian3d;
  throw ConfigError("unknown representation '" + std::string(text) + "'");
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a finite value >= 0");
  }
}

double joint_angle_l1(const Tensor& pred, const Tensor& truth) {
  check_same(pred.shape(), truth.shape(), "joint_angle_l1");
  if (pred.size() == 0) throw ShapeError("joint_angle_l1: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - truth[i]);
  return acc / double(pred.size());
}

double mpjpe(const Tensor& pred, const Tensor& truth, bool squared) {
  check_same(pred.shape(), truth.shape(), "mpjpe");
  if (pred.rank() < 1 || pred.shape().back() != 3 || pred.size() == 0) {
    throw ShapeError("mpjpe: expected [..., 3] poses, got " +
                     shape_string(pred.shape()));
  }
  const std::size_t points = pred.size() / 3;
  double acc = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = pred[3 * p + c] - truth[3 * p + c];
      d2 += d * d;
    }
    acc += squared ? d2 : std::sqrt(d2);
  }
  return acc / double(points);
}

Tensor rows_to_poses(const Tensor& rows) {
  if (rows.rank() != 2 || rows.dim(0) % 3 != 0) {
    throw ShapeError("rows_to_poses: expected 3J x L, got " +
                     shape_string(rows.shape()));
  }
  const std::size_t joints = rows.dim(0) / 3, frames = rows.dim(1);
  Tensor out({frames, joints, 3});
  for (std::size_t j = 0; j < joints; ++j) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t n = 0; n < frames; ++n) {
        out.at(n, j, c) = rows.at(3 * j + c, n);
      }
    }
  }
  return out;
}

Var joint_angle_l1(Var pred, Var truth, Reduction reduction) {
  check_same(pred.shape(), truth.shape(), "joint_angle_l1");
  check_batched(pred.shape(), "joint_angle_l1");
  return reduce(abs(pred - truth), reduction);
}

Var mpjpe(Var pred, Var truth, Reduction reduction, bool squared) {
  check_same(pred.shape(), truth.shape(), "mpjpe");
  check_batched(pred.shape(), "mpjpe");
  const std::size_t k = pred.shape()[1];
  if (k % 3 != 0) throw ShapeError("mpjpe: row count must be a multiple of 3");
  Tensor pool({k / 3, k}, 0.0);
  for (std::size_t r = 0; r < k; ++r) pool.at(r / 3, r) = 1.0;
  Var dist2 = graph_mix(pred.graph().constant(pool), square(pred - truth));
  return reduce(squared ? dist2 : sqrt(dist2), reduction);
}

Var discriminative_loss(Var pred, Var truth, Representation rep,
                        Reduction reduction) {
  return rep == Representation::kExpMapAngle
             ? joint_angle_l1(pred, truth, reduction)
             : mpjpe(pred, truth, reduction);
}

double combined_loss(double disc, double l_g, double l_l, const LossConfig& cfg) {
  cfg.validate();
  if (cfg.lambda == 0.0) return disc;
  return disc - cfg.lambda * (l_g - l_l);
}

Var combined_loss(Var disc, Var l_g, Var l_l, const LossConfig& cfg) {
  cfg.validate();
  if (cfg.lambda == 0.0) return disc;
  return disc - scale(l_g - l_l, cfg.lambda);
}

HorizonMetric default_horizon_metric(Representation rep) {
  return rep == Representation::kExpMapAngle ? HorizonMetric::kAngleEuclidean
                                             : HorizonMetric::kMpjpe;
}

std::size_t horizon_frame(double horizon_ms, double fps) {
  if (!(fps > 0.0) || !(horizon_ms > 0.0)) {
    throw ConfigError("horizon and frame rate must be positive");
  }
  return static_cast<std::size_t>(std::llround(horizon_ms * fps / 1000.0));
}

std::vector<double> horizon_errors(const Tensor& pred, const Tensor& truth,
                                   std::span<const double> horizons_ms,
                                   double fps, HorizonMetric metric) {
  check_same(pred.shape(), truth.shape(), "horizon_errors");
  if (pred.rank() != 2 && pred.rank() != 3) {
    throw ShapeError("horizon_errors: expected K x F or [B, K, F]");
  }
  const bool batched = pred.rank() == 3;
  const std::size_t batch = batched ? pred.dim(0) : 1;
  const std::size_t k = pred.dim(batched ? 1 : 0);
  const std::size_t frames = pred.dim(batched ? 2 : 1);
  if (batch == 0) throw ShapeError("horizon_errors: empty batch");
  if (metric == HorizonMetric::kMpjpe && k % 3 != 0) {
    throw ShapeError("horizon_errors: MPJPE needs 3J rows");
  }
  std::vector<double> out;
  out.reserve(horizons_ms.size());
  for (double ms : horizons_ms) {
    const std::size_t idx = horizon_frame(ms, fps);
    if (idx == 0 || idx > frames) {
      throw UsageError("horizon " + std::to_string(ms) + " ms maps to frame " +
                       std::to_string(idx) + ", outside the " +
                       std::to_string(frames) + " predicted frames");
    }
    const std::size_t col = idx - 1;
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      auto at = [&](const Tensor& t, std::size_t r) {
        return t[(b * k + r) * frames + col];
      };
      double v = 0.0;
      if (metric == HorizonMetric::kMpjpe) {
        for (std::size_t j = 0; j < k / 3; ++j) {
          double d2 = 0.0;
          for (std::size_t c = 0; c < 3; ++c) {
            const double d = at(pred, 3 * j + c) - at(truth, 3 * j + c);
            d2 += d * d;
          }
          v += std::sqrt(d2);
        }
        v /= double(k / 3);
      } else {
        for (std::size_t r = 0; r < k; ++r) {
          const double d = at(pred, r) - at(truth, r);
          v += metric == HorizonMetric::kAngleEuclidean ? d * d : std::abs(d);
        }
        v = metric == HorizonMetric::kAngleEuclidean ? std::sqrt(v) : v / double(k);
      }
      total += v;
    }
    out.push_back(total / double(batch));
  }
  return out;
}

}  // namespace motionood
