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

#include "motionood/ood_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "motionood/error.hpp"

namespace motionood {
namespace {

// Frames of future ground truth needed to score every horizon.
std::size_t eval_future(const BenchmarkConfig& bench, std::size_t t) {
  std::size_t need = t;
  for (double ms : bench.horizons_ms) need = std::max(need, horizon_frame(ms, bench.fps));
  return need;
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (horizons_ms.empty()) throw ConfigError("benchmark: no horizons");
  if (!(fps > 0.0)) throw ConfigError("benchmark: fps must be > 0");
  for (double ms : horizons_ms) {
    if (horizon_frame(ms, fps) == 0) {
      throw ConfigError("benchmark: horizon " + std::to_string(ms) +
                        " ms rounds to frame 0");
    }
  }
  if (train_stride == 0) throw ConfigError("benchmark: train stride must be >= 1");
}

RecursiveOutput recursive_predict(const HybridModel& model, const Tensor& history,
                                  std::size_t total_future) {
  if (total_future == 0) throw UsageError("recursive_predict: total_future must be >= 1");
  const ModelConfig& c = model.config();
  const std::size_t n = c.observed, t = c.future;
  if (history.rank() != 3 || history.dim(1) != c.gcn.nodes || history.dim(2) != n) {
    throw ShapeError("recursive_predict: history must be [B, K, N], got " +
                     shape_string(history.shape()));
  }
  const std::size_t b = history.dim(0), k = history.dim(1);
  RecursiveOutput out;
  out.frames = Tensor({b, k, total_future});
  Tensor window = history;
  std::size_t produced = 0;
  while (produced < total_future) {
    const Tensor full = model.predict(window);  // [B, K, N+T]
    ++out.passes;
    const std::size_t take = std::min(t, total_future - produced);
    for (std::size_t i = 0; i < b * k; ++i) {
      for (std::size_t f = 0; f < take; ++f) {
        out.frames[i * total_future + produced + f] = full[i * (n + t) + n + f];
      }
    }
    produced += take;
    if (produced >= total_future) break;
    // Latest N frames of history followed by the new predictions.
    Tensor next({b, k, n});
    for (std::size_t i = 0; i < b * k; ++i) {
      for (std::size_t f = 0; f < n; ++f) {
        const std::size_t src = t + f;
        next[i * n + f] = src < n ? window[i * n + src] : full[i * (n + t) + src];
      }
    }
    window = std::move(next);
  }
  return out;
}

BenchmarkRun run_benchmark(const OodSplit& split, const ModelConfig& model,
                           const TrainConfig& train, const BenchmarkConfig& bench,
                           const std::vector<std::uint64_t>& seeds) {
  bench.validate();
  if (seeds.empty()) throw ConfigError("benchmark: at least one seed is required");
  const std::size_t n = model.observed, t = model.future;
  const std::size_t test_stride = bench.test_stride == 0 ? t : bench.test_stride;
  const std::size_t f_eval = eval_future(bench, t);

  const WindowSet train_windows = make_windows(split.train, n, t, bench.train_stride);
  WindowSet val_windows;
  if (!split.validation.empty()) {
    val_windows = make_windows(split.validation, n, t, bench.train_stride);
  }
  std::vector<std::pair<std::string, WindowSet>> tests;
  if (!split.test_id.empty()) {
    tests.emplace_back(split.test_id.front().action,
                       make_windows(split.test_id, n, f_eval, test_stride));
  }
  for (const auto& [action, seqs] : split.test_ood) {
    if (seqs.empty()) throw UsageError("benchmark: no test sequences for '" + action + "'");
    tests.emplace_back(action, make_windows(seqs, n, f_eval, test_stride));
  }
  for (const auto& [action, w] : tests) {
    if (w.size() == 0) {
      throw UsageError("benchmark: test sequences of '" + action +
                       "' are shorter than N + " + std::to_string(f_eval));
    }
  }
  const Representation rep = split.train.front().representation;

  BenchmarkRun run;
  for (std::uint64_t seed : seeds) {
    try {
      TrainConfig tc = train;
      tc.seed = seed;
      HybridModel m(model, seed);
      TrainResult tr = motionood::train(m, train_windows,
                                   val_windows.size() ? &val_windows : nullptr, tc);
      std::vector<BenchmarkResult> seed_rows;
      for (const auto& [action, w] : tests) {
        const Tensor pred = recursive_predict(m, w.observed_part(), f_eval).frames;
        const auto errs = horizon_errors(pred, w.future_part(), bench.horizons_ms,
                                         bench.fps, bench.metric);
        for (std::size_t h = 0; h < errs.size(); ++h) {
          seed_rows.push_back({bench.model_tag, action, bench.horizons_ms[h], errs[h],
                               seed, rep});
        }
      }
      const std::size_t first_ood = split.test_id.empty() ? 0 : 1;
      const std::size_t n_ood = tests.size() - first_ood;
      if (n_ood > 0) {
        for (std::size_t h = 0; h < bench.horizons_ms.size(); ++h) {
          double acc = 0.0;
          for (std::size_t a = first_ood; a < tests.size(); ++a) {
            acc += seed_rows[a * bench.horizons_ms.size() + h].value;
          }
          run.ood_average.push_back({bench.model_tag, kOodAverageAction,
                                     bench.horizons_ms[h], acc / double(n_ood), seed,
                                     rep});
        }
      }
      run.rows.insert(run.rows.end(), seed_rows.begin(), seed_rows.end());
      run.seeds.push_back({seed, std::move(tr)});
    } catch (const Error& e) {
      run.failures.push_back({seed, e.what()});
    }
  }
  return run;
}

std::vector<AggregateRow> aggregate_seeds(const std::vector<BenchmarkResult>& results) {
  using Key = std::tuple<std::string, std::string, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> cells;
  for (const auto& r : results) {
    Key key{r.model, r.action, r.horizon_ms};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.value);
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const auto& v = cells[key];
    AggregateRow row;
    std::tie(row.model, row.action, row.horizon_ms) = key;
    row.n_seeds = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    row.mean = sum / double(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean) * (x - row.mean);
      row.std = std::sqrt(ss / double(v.size() - 1));
    } else {
      row.single_seed = true;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace motionood
