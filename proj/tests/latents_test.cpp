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
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "motionood/error.hpp"
#include "motionood/hybrid_model.hpp"
#include "motionood/latents.hpp"
#include "motionood/synthetic.hpp"
#include "test_util.hpp"

namespace motionood {
namespace {

using testing::TempDir;

ModelConfig vae_config(bool vae = true) {
  ModelConfig c;
  c.gcn.nodes = 3;
  c.gcn.coeffs = 8;
  c.gcn.hidden = 8;
  c.gcn.blocks = 1;
  c.with_vae = vae;
  c.vae.latent = 2;
  c.vae.encoder_blocks = 1;
  c.vae.decoder_blocks = 1;
  c.observed = 4;
  c.future = 4;
  return c;
}

WindowSet some_windows() {
  const MotionDataset ds = synthesize_dataset(banded_classes(2, 3, 0.01, 1), 2, 40, 25.0);
  return make_windows(ds.sequences, 4, 4, 4);
}

std::vector<LatentRecord> records_from(const std::vector<std::vector<double>>& pts) {
  std::vector<LatentRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back({"r" + std::to_string(i), i % 2 ? "odd" : "even", pts[i]});
  }
  return out;
}

double dist2(double ax, double ay, double bx, double by) {
  return (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
}

TEST(ExtractLatentsTest, OneRecordPerWindow) {
  const HybridModel model(vae_config(), 1);
  const WindowSet w = some_windows();
  const auto recs = extract_latents(model, w);
  ASSERT_EQ(recs.size(), w.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].z.size(), 3u * 2u);
    EXPECT_EQ(recs[i].id, w.ids[i]);
    EXPECT_EQ(recs[i].label, w.labels[i]);
  }
  const auto again = extract_latents(model, w);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].z, again[i].z);
}

TEST(ExtractLatentsTest, NeedsVaeAndWindows) {
  EXPECT_THROW(extract_latents(HybridModel(vae_config(false), 1), some_windows()), UsageError);
  EXPECT_THROW(extract_latents(HybridModel(vae_config(), 1), WindowSet{}), UsageError);
}

TEST(PcaTest, PlanarDataKeepsDistances) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  // Points on a tilted plane in 3D: the projection is an isometry.
  const double a[3] = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0};
  const double b[3] = {0.0, 0.0, 1.0};
  std::vector<std::vector<double>> pts;
  std::vector<std::pair<double, double>> plane;
  for (int i = 0; i < 40; ++i) {
    const double s = 3.0 * u(rng), t = u(rng);
    plane.emplace_back(s, t);
    pts.push_back({s * a[0] + t * b[0] + 5.0, s * a[1] + t * b[1] - 1.0, s * a[2] + t * b[2]});
  }
  const Projection p = project_pca_2d(records_from(pts));
  ASSERT_EQ(p.points.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = i + 1; j < 40; ++j) {
      EXPECT_NEAR(dist2(p.points[i].x, p.points[i].y, p.points[j].x, p.points[j].y),
                  dist2(plane[i].first, plane[i].second, plane[j].first, plane[j].second),
                  1e-9);
    }
  }
  EXPECT_NEAR(p.component_variance[0] + p.component_variance[1], p.total_variance, 1e-9);
}

TEST(PcaTest, TwoDimensionalInputIsRigidMotion) {
  const auto recs = records_from({{0, 0}, {3, 0}, {0, 1}, {3, 1}, {1.5, 0.5}});
  const Projection p = project_pca_2d(recs);
  // Largest spread is along the first axis; sign fixed positive.
  EXPECT_NEAR(p.components[0][0], 1.0, 1e-12);
  EXPECT_NEAR(p.points[1].x - p.points[0].x, 3.0, 1e-12);
  EXPECT_NEAR(p.points[4].x, 0.0, 1e-12);
  EXPECT_NEAR(p.points[4].y, 0.0, 1e-12);
}

TEST(PcaPropertyTest, VarianceOrderingAndBound) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + rng() % 6;
    std::vector<std::vector<double>> pts(30, std::vector<double>(d));
    for (auto& p : pts) {
      for (std::size_t j = 0; j < d; ++j) p[j] = g(rng) * double(j + 1);
    }
    const Projection p = project_pca_2d(records_from(pts));
    EXPECT_GE(p.component_variance[0], p.component_variance[1]);
    EXPECT_LE(p.component_variance[0] + p.component_variance[1], p.total_variance + 1e-12);
    // Sample variance of each projected coordinate equals its eigenvalue.
    double vx = 0.0, vy = 0.0, mx = 0.0, my = 0.0;
    for (const auto& q : p.points) {
      mx += q.x / 30.0;
      my += q.y / 30.0;
    }
    for (const auto& q : p.points) {
      vx += (q.x - mx) * (q.x - mx) / 29.0;
      vy += (q.y - my) * (q.y - my) / 29.0;
    }
    EXPECT_NEAR(vx, p.component_variance[0], 1e-9 * p.total_variance);
    EXPECT_NEAR(vy, p.component_variance[1], 1e-9 * p.total_variance);
    double norm = 0.0, dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      norm += p.components[0][j] * p.components[0][j];
      dot += p.components[0][j] * p.components[1][j];
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_NEAR(dot, 0.0, 1e-12);
  }
}

TEST(PcaTest, Errors) {
  EXPECT_THROW(project_pca_2d(records_from({{0, 1}, {1, 0}})), UsageError);
  EXPECT_THROW(project_pca_2d(records_from({{0}, {1}, {2}})), UsageError);
  EXPECT_THROW(project_pca_2d(records_from({{0, 1}, {1, 0}, {1}})), ShapeError);
}

TEST(LatentCsvTest, RoundTrip) {
  TempDir dir("lat");
  auto recs = records_from({{1.0 / 3.0, -2e-17}, {4, 5}, {6, 7}});
  export_latents_csv(recs, dir / "z.csv");
  const auto back = load_latents_csv(dir / "z.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].id, recs[i].id);
    EXPECT_EQ(back[i].label, recs[i].label);
    EXPECT_EQ(back[i].z, recs[i].z);
  }
  std::ifstream in(dir / "z.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "id,label,z_0,z_1");
  EXPECT_THROW(export_latents_csv({}, dir / "e.csv"), UsageError);
}

TEST(LatentCsvTest, ProjectionFile) {
  TempDir dir("proj");
  const Projection p = project_pca_2d(records_from({{0, 0}, {1, 0}, {0, 2}}));
  export_projection_csv(p, dir / "p.csv");
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::size_t lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "id,label,x,y");
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3u);
}

}  // namespace
}  // namespace motionood
