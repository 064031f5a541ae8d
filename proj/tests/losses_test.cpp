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
#include <cstring>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "motionood/error.hpp"
#include "motionood/grad_check.hpp"
#include "motionood/losses.hpp"
#include "test_util.hpp"

namespace motionood {
namespace {

using testing::random_tensor;

TEST(JointAngleL1Test, KnownValues) {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({4, 20}, rng);
  EXPECT_EQ(joint_angle_l1(x, x), 0.0);
  EXPECT_EQ(joint_angle_l1(Tensor::matrix(1, 2, {1, 3}), Tensor::matrix(1, 2, {0, 0})), 2.0);
  EXPECT_THROW(joint_angle_l1(Tensor({2, 3}), Tensor({3, 2})), ShapeError);
}

TEST(JointAngleL1Test, MatchesDoubleLoop) {
  std::mt19937_64 rng(2);
  const Tensor p = random_tensor({6, 11}, rng), t = random_tensor({6, 11}, rng);
  double want = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    for (std::size_t n = 0; n < 11; ++n) want += std::abs(p.at(k, n) - t.at(k, n));
  }
  EXPECT_NEAR(joint_angle_l1(p, t), want / 66.0, 1e-12);
}

TEST(MpjpeTest, KnownValues) {
  EXPECT_EQ(mpjpe(Tensor({1, 1, 3}, std::vector<double>{3, 4, 0}), Tensor({1, 1, 3})), 5.0);
  EXPECT_EQ(mpjpe(Tensor({1, 1, 3}, std::vector<double>{3, 4, 0}), Tensor({1, 1, 3}), true),
            25.0);
  std::mt19937_64 rng(3);
  const Tensor p = random_tensor({5, 4, 3}, rng);
  EXPECT_EQ(mpjpe(p, p), 0.0);
  EXPECT_THROW(mpjpe(Tensor({2, 4}), Tensor({2, 4})), ShapeError);
}

TEST(MpjpeTest, MatchesPerJointNorms) {
  std::mt19937_64 rng(4);
  const Tensor p = random_tensor({7, 5, 3}, rng, -100.0, 100.0);
  const Tensor t = random_tensor({7, 5, 3}, rng, -100.0, 100.0);
  double want = 0.0;
  for (std::size_t i = 0; i < 35; ++i) {
    const double dx = p[3 * i] - t[3 * i], dy = p[3 * i + 1] - t[3 * i + 1],
                 dz = p[3 * i + 2] - t[3 * i + 2];
    want += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  EXPECT_NEAR(mpjpe(p, t), want / 35.0, 1e-12 * want);
}

TEST(MpjpeTest, GraphVersionMatchesTensorVersion) {
  std::mt19937_64 rng(5);
  const Tensor p = random_tensor({2, 6, 7}, rng), t = random_tensor({2, 6, 7}, rng);
  Graph g;
  Var pv = g.parameter(p);
  Var loss = mpjpe(pv, g.constant(t));
  double want = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    Tensor pb({6, 7}, std::vector<double>(p.data() + b * 42, p.data() + b * 42 + 42));
    Tensor tb({6, 7}, std::vector<double>(t.data() + b * 42, t.data() + b * 42 + 42));
    want += mpjpe(rows_to_poses(pb), rows_to_poses(tb));
  }
  EXPECT_NEAR(g.evaluate(loss).item(), want / 2.0, 1e-12);
  EXPECT_TRUE(grad_check(g, loss, {{"pred", pv}}).passed());
}

TEST(JointAngleL1Test, GraphVersionReductions) {
  std::mt19937_64 rng(6);
  const Tensor p = random_tensor({3, 4, 5}, rng), t = random_tensor({3, 4, 5}, rng);
  Graph g;
  Var pv = g.parameter(p);
  Var mean_loss = joint_angle_l1(pv, g.constant(t), Reduction::kMean);
  Var sum_loss = joint_angle_l1(pv, g.constant(t), Reduction::kSum);
  const double mean = g.evaluate(mean_loss).item();
  const double total = g.evaluate(sum_loss).item();
  EXPECT_NEAR(mean, joint_angle_l1(p, t), 1e-12);
  EXPECT_NEAR(total, 20.0 * mean, 1e-12);
  EXPECT_TRUE(grad_check(g, mean_loss, {{"pred", pv}}).passed());
}

TEST(RowsToPosesTest, Layout) {
  Tensor rows({6, 2});
  for (std::size_t i = 0; i < 12; ++i) rows[i] = double(i);
  const Tensor poses = rows_to_poses(rows);
  ASSERT_EQ(poses.shape(), (Shape{2, 2, 3}));
  // Frame 1, joint 1, coordinate z is row 5, column 1.
  EXPECT_EQ(poses[1 * 6 + 1 * 3 + 2], rows.at(5, 1));
  EXPECT_THROW(rows_to_poses(Tensor({4, 2})), ShapeError);
}

TEST(CombinedLossTest, Arithmetic) {
  LossConfig cfg;
  EXPECT_EQ(combined_loss(0.3, -7.0, 2.0, cfg), 0.3);
  cfg.lambda = 0.003;
  EXPECT_NEAR(combined_loss(1.0, -2.0, 0.5, cfg), 1.0075, 1e-15);
  cfg.lambda = -1.0;
  EXPECT_THROW(combined_loss(1.0, 0.0, 0.0, cfg), ConfigError);
}

TEST(CombinedLossTest, ZeroLambdaIsBitExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const double d = u(rng);
    const double got = combined_loss(d, u(rng), u(rng), LossConfig{});
    EXPECT_EQ(std::memcmp(&got, &d, sizeof d), 0);
  }
  Graph g;
  Var d = g.parameter(Tensor::scalar(0.25));
  EXPECT_EQ(combined_loss(d, g.parameter(Tensor::scalar(1.0)),
                          g.parameter(Tensor::scalar(2.0)), LossConfig{}).id(),
            d.id());
}

TEST(CombinedLossPropertyTest, AffineInLambda) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double d = u(rng), lg = u(rng), ll = u(rng);
    auto at = [&](double lambda) {
      LossConfig c;
      c.lambda = lambda;
      return combined_loss(d, lg, ll, c);
    };
    const double slope = -(lg - ll);
    EXPECT_NEAR(at(0.5) - at(0.0), 0.5 * slope, 1e-12);
    EXPECT_NEAR(at(2.0) - at(0.5), 1.5 * slope, 1e-12);
  }
}

TEST(MetricPropertyTest, NonNegativeZeroIffEqual) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = random_tensor({6, 5}, rng);
    Tensor b = a;
    EXPECT_EQ(joint_angle_l1(a, b), 0.0);
    EXPECT_EQ(mpjpe(rows_to_poses(a), rows_to_poses(b)), 0.0);
    b[rng() % b.size()] += 1e-3;
    EXPECT_GT(joint_angle_l1(a, b), 0.0);
    EXPECT_GT(mpjpe(rows_to_poses(a), rows_to_poses(b)), 0.0);
  }
}

TEST(MetricPropertyTest, L1TriangleInequality) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor x = random_tensor({4, 6}, rng), y = random_tensor({4, 6}, rng),
                 t = random_tensor({4, 6}, rng);
    // d(x, t) <= d(x, y) + d(y, t) with d the per-element mean distance.
    EXPECT_LE(joint_angle_l1(x, t), joint_angle_l1(x, y) + joint_angle_l1(y, t) + 1e-15);
  }
}

TEST(MetricPropertyTest, MpjpeTranslationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor p = random_tensor({3, 5, 3}, rng), t = random_tensor({3, 5, 3}, rng);
    const double shift[3] = {u(rng), u(rng), u(rng)};
    Tensor ps = p, ts = t;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      ps[i] += shift[i % 3];
      ts[i] += shift[i % 3];
    }
    EXPECT_NEAR(mpjpe(ps, ts), mpjpe(p, t), 1e-9);
  }
}

TEST(HorizonTest, FrameMapping) {
  EXPECT_EQ(horizon_frame(80, 25), 2u);
  EXPECT_EQ(horizon_frame(160, 25), 4u);
  EXPECT_EQ(horizon_frame(320, 25), 8u);
  EXPECT_EQ(horizon_frame(400, 25), 10u);
  EXPECT_EQ(horizon_frame(560, 25), 14u);
  EXPECT_EQ(horizon_frame(1000, 25), 25u);
  EXPECT_THROW(horizon_frame(80, 0), ConfigError);
}

TEST(HorizonTest, ZeroErrorWhenExact) {
  std::mt19937_64 rng(12);
  const Tensor f = random_tensor({6, 10}, rng);
  const std::vector<double> hs = {80, 160, 320, 400};
  for (auto m : {HorizonMetric::kAngleEuclidean, HorizonMetric::kAngleMeanAbs,
                 HorizonMetric::kMpjpe}) {
    EXPECT_EQ(horizon_errors(f, f, hs, 25, m), std::vector<double>(4, 0.0));
  }
}

TEST(HorizonTest, PicksTheHorizonFrame) {
  Tensor truth({2, 10}), pred({2, 10});
  // Error only at frame 4 (160 ms): column 3.
  pred.at(0, 3) = 3.0;
  pred.at(1, 3) = -4.0;
  const std::vector<double> hs = {80, 160, 320, 400};
  EXPECT_EQ(horizon_errors(pred, truth, hs, 25, HorizonMetric::kAngleEuclidean),
            (std::vector<double>{0, 5, 0, 0}));
  EXPECT_EQ(horizon_errors(pred, truth, hs, 25, HorizonMetric::kAngleMeanAbs),
            (std::vector<double>{0, 3.5, 0, 0}));
  const std::vector<double> far = {1000};
  EXPECT_THROW(horizon_errors(pred, truth, far, 25, HorizonMetric::kAngleEuclidean),
               UsageError);
}

TEST(HorizonTest, BatchIsAveraged) {
  std::mt19937_64 rng(13);
  const Tensor p = random_tensor({3, 6, 10}, rng), t = random_tensor({3, 6, 10}, rng);
  const std::vector<double> hs = {80, 400};
  const auto all = horizon_errors(p, t, hs, 25, HorizonMetric::kMpjpe);
  std::vector<double> want(2, 0.0);
  for (std::size_t b = 0; b < 3; ++b) {
    Tensor pb({6, 10}, std::vector<double>(p.data() + b * 60, p.data() + b * 60 + 60));
    Tensor tb({6, 10}, std::vector<double>(t.data() + b * 60, t.data() + b * 60 + 60));
    const auto one = horizon_errors(pb, tb, hs, 25, HorizonMetric::kMpjpe);
    want[0] += one[0] / 3.0;
    want[1] += one[1] / 3.0;
  }
  EXPECT_NEAR(all[0], want[0], 1e-12);
  EXPECT_NEAR(all[1], want[1], 1e-12);
}

TEST(RepresentationTest, Names) {
  EXPECT_EQ(parse_representation("angle"), Representation::kExpMapAngle);
  EXPECT_EQ(parse_representation("cartesian-3d"), Representation::kCartesian3d);
  EXPECT_EQ(parse_representation(representation_name(Representation::kCartesian3d)),
            Representation::kCartesian3d);
  EXPECT_THROW(parse_representation("quaternion"), ConfigError);
  EXPECT_EQ(default_horizon_metric(Representation::kCartesian3d), HorizonMetric::kMpjpe);
}

}  // namespace
}  // namespace motionood
