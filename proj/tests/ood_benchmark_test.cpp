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

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "motionood/error.hpp"
#include "motionood/hybrid_model.hpp"
#include "motionood/ood_benchmark.hpp"
#include "motionood/result_table.hpp"
#include "motionood/synthetic.hpp"
#include "test_util.hpp"

namespace motionood {
namespace {

using testing::random_tensor;
using testing::TempDir;

ModelConfig tiny_model(std::size_t k, std::size_t n, std::size_t t) {
  ModelConfig c;
  c.gcn.nodes = k;
  c.gcn.coeffs = n + t;
  c.gcn.hidden = 8;
  c.gcn.blocks = 1;
  c.gcn.dropout = 0.1;
  c.vae.latent = 2;
  c.vae.encoder_blocks = 1;
  c.vae.decoder_blocks = 1;
  c.observed = n;
  c.future = t;
  return c;
}

// Keeps a running history and always feeds the model its latest N frames.
Tensor chained_oracle(const HybridModel& model, const Tensor& history, std::size_t total) {
  const std::size_t b = history.dim(0), k = history.dim(1), n = history.dim(2);
  const std::size_t t = model.config().future;
  std::vector<std::vector<double>> track(b * k);
  for (std::size_t i = 0; i < b * k; ++i) {
    track[i].assign(history.data() + i * n, history.data() + (i + 1) * n);
  }
  while (track[0].size() < n + total) {
    Tensor window({b, k, n});
    for (std::size_t i = 0; i < b * k; ++i) {
      std::copy(track[i].end() - long(n), track[i].end(), window.data() + i * n);
    }
    const Tensor full = model.predict(window);
    for (std::size_t i = 0; i < b * k; ++i) {
      for (std::size_t f = 0; f < t; ++f) track[i].push_back(full[i * (n + t) + n + f]);
    }
  }
  Tensor out({b, k, total});
  for (std::size_t i = 0; i < b * k; ++i) {
    std::copy_n(track[i].begin() + long(n), total, out.data() + i * total);
  }
  return out;
}

TEST(RecursivePredictTest, SinglePassEqualsPredict) {
  std::mt19937_64 rng(1);
  const HybridModel model(tiny_model(3, 4, 6), 1);
  const Tensor h = random_tensor({2, 3, 4}, rng);
  const RecursiveOutput r = recursive_predict(model, h, 6);
  EXPECT_EQ(r.passes, 1u);
  const Tensor full = model.predict(h);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t f = 0; f < 6; ++f) EXPECT_EQ(r.frames[i * 6 + f], full[i * 10 + 4 + f]);
  }
}

TEST(RecursivePredictTest, PassCount) {
  std::mt19937_64 rng(2);
  const HybridModel model(tiny_model(3, 10, 10), 2);
  const Tensor h = random_tensor({1, 3, 10}, rng);
  EXPECT_EQ(recursive_predict(model, h, 25).passes, 3u);
  EXPECT_EQ(recursive_predict(model, h, 20).passes, 2u);
  EXPECT_EQ(recursive_predict(model, h, 1).passes, 1u);
  EXPECT_THROW(recursive_predict(model, h, 0), UsageError);
  EXPECT_THROW(recursive_predict(model, random_tensor({1, 3, 9}, rng), 5), ShapeError);
}

TEST(RecursivePredictTest, IdentityModelHoldsLastFrame) {
  std::mt19937_64 rng(3);
  HybridModel model(tiny_model(4, 5, 5), 3);
  model.zero_parameters();
  const Tensor h = random_tensor({2, 4, 5}, rng);
  const Tensor out = recursive_predict(model, h, 23).frames;
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t f = 0; f < 23; ++f) EXPECT_NEAR(out[i * 23 + f], h[i * 5 + 4], 1e-12);
  }
}

TEST(RecursivePredictPropertyTest, MatchesChainedPredictions) {
  std::mt19937_64 rng(4);
  for (auto [n, t] : {std::pair<std::size_t, std::size_t>{10, 10}, {6, 4}, {3, 7}}) {
    const HybridModel model(tiny_model(3, n, t), 5);
    const Tensor h = random_tensor({2, 3, n}, rng);
    for (std::size_t m : {1u, 2u, 3u}) {
      const Tensor got = recursive_predict(model, h, m * t).frames;
      EXPECT_TRUE(bit_identical(got, chained_oracle(model, h, m * t)))
          << "N=" << n << " T=" << t << " m=" << m;
    }
  }
}

TEST(AggregateTest, MeanAndSampleStd) {
  std::vector<BenchmarkResult> r = {{"m", "walking", 80, 0.22, 0},
                                    {"m", "walking", 80, 0.23, 1},
                                    {"m", "walking", 80, 0.24, 2}};
  const auto rows = aggregate_seeds(r);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean, 0.23, 1e-15);
  EXPECT_NEAR(rows[0].std, 0.01, 1e-15);
  EXPECT_EQ(rows[0].n_seeds, 3u);
  EXPECT_FALSE(rows[0].single_seed);
}

TEST(AggregateTest, SingleSeedIsFlagged) {
  const auto rows = aggregate_seeds({{"m", "a", 80, 0.5, 0}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].std, 0.0);
  EXPECT_TRUE(rows[0].single_seed);
}

TEST(AggregateTest, MatchesOracleOnGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const std::vector<std::string> actions = {"a", "b", "c"};
  const std::vector<double> horizons = {80, 160, 320, 400};
  double vals[3][4][5];
  std::vector<BenchmarkResult> results;
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t h = 0; h < 4; ++h) {
        vals[a][h][s] = u(rng);
        results.push_back({"m", actions[a], horizons[h], vals[a][h][s], s});
      }
    }
  }
  const auto rows = aggregate_seeds(results);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t h = 0; h < 4; ++h) {
      const auto& row = rows[a * 4 + h];
      EXPECT_EQ(row.action, actions[a]);
      EXPECT_EQ(row.horizon_ms, horizons[h]);
      double mean = 0.0;
      for (double v : vals[a][h]) mean += v / 5.0;
      double var = 0.0;
      for (double v : vals[a][h]) var += (v - mean) * (v - mean) / 4.0;
      EXPECT_NEAR(row.mean, mean, 1e-14);
      EXPECT_NEAR(row.std, std::sqrt(var), 1e-14);
    }
  }
}

TEST(ResultTableTest, CsvRoundTrip) {
  std::vector<AggregateRow> rows = {{"hybrid", "walking", 80, 1.0 / 3.0, 0.125, 3, false},
                                    {"plain", "ood_average", 1000, 2.5e-7, 0.0, 1, true}};
  const auto back = parse_results_csv(format_results_csv(rows));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].model, rows[i].model);
    EXPECT_EQ(back[i].action, rows[i].action);
    EXPECT_EQ(back[i].horizon_ms, rows[i].horizon_ms);
    EXPECT_EQ(back[i].mean, rows[i].mean);
    EXPECT_EQ(back[i].std, rows[i].std);
    EXPECT_EQ(back[i].n_seeds, rows[i].n_seeds);
  }
  EXPECT_TRUE(back[1].single_seed);
}

TEST(ResultTableTest, OneRowGivesHeaderAndOneLine) {
  const std::string csv = format_results_csv({{"m", "a", 80, 0.5, 0.0, 1, true}});
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 2u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,action,horizon_ms,mean,std,n_seeds");
}

TEST(ResultTableTest, AlignedTableAndFiles) {
  TempDir dir("table");
  std::vector<AggregateRow> rows = {{"hybrid", "walking", 80, 0.25, 0.01, 3, false},
                                    {"hybrid", "eating", 80, 0.5, 0.02, 3, false}};
  const std::string text = format_aligned_table(rows);
  EXPECT_NE(text.find("hybrid"), std::string::npos);
  EXPECT_NE(text.find("eating"), std::string::npos);
  emit_table(rows, TableFormat::kCsv, dir / "r.csv");
  emit_table(rows, TableFormat::kAlignedText, dir / "r.txt");
  const auto back = load_results_csv(dir / "r.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].mean, 0.5);
  EXPECT_THROW(parse_results_csv("wrong,header\n"), ParseError);
}

OodSplit small_split(std::uint64_t seed) {
  const MotionDataset ds = synthesize_dataset(banded_classes(3, 3, 0.02, seed), 4, 60, 25.0);
  return make_ood_split(ds, synthetic_split(3, 4));
}

BenchmarkConfig small_bench() {
  BenchmarkConfig b;
  b.model_tag = "tiny";
  b.horizons_ms = {80, 200, 400};
  b.train_stride = 3;
  return b;
}

TrainConfig small_train() {
  TrainConfig t;
  t.epochs = 1;
  t.batch_size = 8;
  return t;
}

TEST(RunBenchmarkTest, RowLayoutAndOodAverage) {
  const OodSplit split = small_split(1);
  const BenchmarkRun run =
      run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {0, 1});
  EXPECT_TRUE(run.failures.empty());
  ASSERT_EQ(run.seeds.size(), 2u);
  const std::size_t actions = 1 + split.test_ood.size();
  ASSERT_EQ(run.rows.size(), 2 * actions * 3);
  ASSERT_EQ(run.ood_average.size(), 2u * 3u);
  EXPECT_EQ(run.rows[0].action, "class0");
  EXPECT_EQ(run.rows[3].action, "class1");
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t h = 0; h < 3; ++h) {
      double sum = 0.0;
      for (std::size_t a = 1; a < actions; ++a) sum += run.rows[s * actions * 3 + a * 3 + h].value;
      const auto& avg = run.ood_average[s * 3 + h];
      EXPECT_EQ(avg.action, kOodAverageAction);
      EXPECT_NEAR(avg.value, sum / double(actions - 1), 1e-15);
    }
  }
  for (const auto& r : run.rows) {
    EXPECT_TRUE(std::isfinite(r.value));
    EXPECT_GE(r.value, 0.0);
  }
}

TEST(RunBenchmarkTest, DeterministicPerSeed) {
  const OodSplit split = small_split(2);
  const auto a = run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {3});
  const auto b = run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {3});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].value, b.rows[i].value);
  const auto c = run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {4});
  EXPECT_NE(a.rows[0].value, c.rows[0].value);
}

TEST(RunBenchmarkTest, FailingSeedsAreRecorded) {
  OodSplit split = small_split(3);
  split.train[0].frames[0] = std::numeric_limits<double>::quiet_NaN();
  const BenchmarkRun run =
      run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {0, 1});
  EXPECT_EQ(run.failures.size(), 2u);
  EXPECT_TRUE(run.rows.empty());
  EXPECT_FALSE(run.failures[0].message.empty());
}

TEST(RunBenchmarkTest, ConfigErrors) {
  const OodSplit split = small_split(4);
  BenchmarkConfig b = small_bench();
  b.horizons_ms = {10};
  EXPECT_THROW(run_benchmark(split, tiny_model(3, 5, 5), small_train(), b, {0}), ConfigError);
  EXPECT_THROW(run_benchmark(split, tiny_model(3, 5, 5), small_train(), small_bench(), {}),
               ConfigError);
  b = small_bench();
  b.horizons_ms = {4000};
  EXPECT_THROW(run_benchmark(split, tiny_model(3, 5, 5), small_train(), b, {0}), UsageError);
}

}  // namespace
}  // namespace motionood
