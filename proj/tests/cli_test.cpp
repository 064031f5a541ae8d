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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "gtest/gtest.h"
#include "motionood/checkpoint.hpp"
#include "test_util.hpp"

#ifndef MOTIONOOD_CLI_PATH
#error "MOTIONOOD_CLI_PATH must name the motionood executable"
#endif

namespace motionood {
namespace {

using testing::TempDir;

// Small enough that every subcommand finishes in seconds.
const char* kQuick =
    " --set synthetic.length=60 synthetic.sequences=3 synthetic.classes=3"
    " model.hidden=8 model.blocks=2 model.encoder_blocks=1 model.decoder_blocks=1 train.epochs=1"
    " classifier.epochs=5 benchmark.horizons_ms=80,400";

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args, const TempDir& dir) {
  const auto log = dir / "cli_output.txt";
  const std::string cmd =
      std::string("\"") + MOTIONOOD_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliTest, TrainWritesLoadableCheckpoint) {
  TempDir dir("cli_train");
  const auto out = dir / "run";
  const Result r = run("train --preset synthetic --seed 7 -o \"" + out.string() + "\"" + kQuick, dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(std::filesystem::exists(out / "loss_log.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "config.ini"));
  const HybridModel m = load_checkpoint(out / "model.ckpt");
  EXPECT_TRUE(m.has_vae());
  EXPECT_EQ(m.config().gcn.hidden, 8u);
}

TEST(CliTest, NegativeLambdaIsUsageError) {
  TempDir dir("cli_lambda");
  const Result r = run("train --preset synthetic --lambda -1 -o \"" + (dir / "x").string() + "\"" + kQuick, dir);
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("lambda"), std::string::npos) << r.output;
}

TEST(CliTest, MissingDataRootNamesPath) {
  TempDir dir("cli_root");
  const Result r = run("train --preset h36m-walking --data-root /no/such/motion/root -o \"" +
                           (dir / "x").string() + "\"",
                       dir);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("/no/such/motion/root"), std::string::npos) << r.output;
}

TEST(CliTest, UnknownSubcommandOrKey) {
  TempDir dir("cli_bad");
  EXPECT_EQ(run("dance", dir).code, 1);
  EXPECT_EQ(run("train --preset synthetic --set train.bogus=1", dir).code, 1);
}

TEST(CliTest, BenchmarkRerunIsIdentical) {
  TempDir dir("cli_bench");
  // One --set list: a second --set flag would replace the first.
  const std::string common = " --preset synthetic" + std::string(kQuick) + " run.seeds=0,1";
  const Result a = run("benchmark -o \"" + (dir / "a").string() + "\"" + common, dir);
  ASSERT_EQ(a.code, 0) << a.output;
  const Result b = run("benchmark -o \"" + (dir / "b").string() + "\"" + common, dir);
  ASSERT_EQ(b.code, 0) << b.output;
  const std::string csv = slurp(dir / "a" / "results.csv");
  EXPECT_FALSE(csv.empty());
  EXPECT_EQ(csv, slurp(dir / "b" / "results.csv"));
  EXPECT_EQ(slurp(dir / "a" / "results_per_seed.csv"), slurp(dir / "b" / "results_per_seed.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "results.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "loss_hybrid_seed1.csv"));
  EXPECT_NE(csv.find("ood_average"), std::string::npos);
}

TEST(CliTest, ClassifyWritesSquareConfusion) {
  TempDir dir("cli_cls");
  const auto out = dir / "c";
  const Result r = run("classify --preset synthetic -o \"" + out.string() + "\"" + kQuick, dir);
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream in(out / "confusion.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3) << line;
  }
  EXPECT_EQ(rows, 3u);
  EXPECT_TRUE(std::filesystem::exists(out / "precision_recall.csv"));
}

TEST(CliTest, LatentsNeedVaeCheckpoint) {
  TempDir dir("cli_lat");
  const auto plain = dir / "plain";
  ASSERT_EQ(run("train --preset synthetic -o \"" + plain.string() + "\"" + kQuick +
                    " model.with_vae=false",
                dir)
                .code,
            0);
  const Result bad = run("latents --preset synthetic --checkpoint \"" +
                             (plain / "model.ckpt").string() + "\" -o \"" +
                             (dir / "l").string() + "\"" + kQuick,
                         dir);
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.output.find("VAE"), std::string::npos) << bad.output;

  const auto hybrid = dir / "hybrid";
  ASSERT_EQ(run("train --preset synthetic -o \"" + hybrid.string() + "\"" + kQuick, dir).code, 0);
  const Result ok = run("latents --preset synthetic --checkpoint \"" +
                            (hybrid / "model.ckpt").string() + "\" -o \"" +
                            (dir / "l").string() + "\"" + kQuick,
                        dir);
  ASSERT_EQ(ok.code, 0) << ok.output;
  EXPECT_TRUE(std::filesystem::exists(dir / "l" / "latents.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "l" / "projection.csv"));
}

TEST(CliTest, ConfigFileReproducesRun) {
  TempDir dir("cli_cfg");
  const auto first = dir / "first";
  ASSERT_EQ(run("train --preset synthetic --seed 3 -o \"" + first.string() + "\"" + kQuick, dir).code, 0);
  const auto second = dir / "second";
  const Result r = run("train -c \"" + (first / "config.ini").string() + "\" -o \"" +
                           second.string() + "\"",
                       dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(first / "loss_log.csv"), slurp(second / "loss_log.csv"));
  EXPECT_EQ(slurp(first / "model.ckpt"), slurp(second / "model.ckpt"));
}

}  // namespace
}  // namespace motionood
