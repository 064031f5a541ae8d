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
#include <cstdint>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "motionood/checkpoint.hpp"
#include "motionood/dct.hpp"
#include "motionood/error.hpp"
#include "motionood/gcn.hpp"
#include "motionood/hybrid_model.hpp"
#include "test_util.hpp"

namespace motionood {
namespace {

using testing::random_tensor;
using testing::TempDir;

// Row-major K x n matrix as nested vectors, for the straight-line oracles.
using Mat = std::vector<std::vector<double>>;

Mat to_mat(const Tensor& t) {
  Mat m(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.at(i, j);
  }
  return m;
}

Mat gcl_oracle(const Mat& s, const Mat& a, const Mat& w, const std::vector<double>& b) {
  const std::size_t k = s.size(), n_in = w.size(), n_out = b.size();
  Mat out(k, std::vector<double>(n_out, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t o = 0; o < n_out; ++o) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t c = 0; c < n_in; ++c) acc += s[i][j] * a[j][c] * w[c][o];
      }
      out[i][o] = acc + b[o];
    }
  }
  return out;
}

Tensor eval_gcl(const ParameterSet& set, const GclParams& p, const Tensor& a) {
  Graph g;
  BoundParameters bound(g, set, false);
  ForwardContext ctx{g, bound, Mode::kEval, 1e-5, {}};
  return g.evaluate(gcl_forward(ctx, p, g.constant(a)));
}

TEST(GclTest, IdentityParametersPassInputThrough) {
  std::mt19937_64 rng(1);
  ParameterSet set;
  const GclParams p = add_gcl(set, "l", 4, 4, 4, ParamGroup::kDiscriminative, rng);
  Tensor eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  set[p.graph].value = eye;
  set[p.weight].value = eye;
  const Tensor a = random_tensor({4, 4}, rng);
  EXPECT_TRUE(bit_identical(eval_gcl(set, p, a), a));
}

TEST(GclTest, ZeroInputZeroBiasGivesZero) {
  std::mt19937_64 rng(2);
  ParameterSet set;
  const GclParams p = add_gcl(set, "l", 4, 3, 5, ParamGroup::kDiscriminative, rng);
  EXPECT_EQ(eval_gcl(set, p, Tensor({4, 3})), Tensor({4, 5}));
}

TEST(GclTest, MatchesTripleLoop) {
  std::mt19937_64 rng(3);
  ParameterSet set;
  const GclParams p = add_gcl(set, "l", 4, 3, 5, ParamGroup::kDiscriminative, rng);
  set[p.bias].value = random_tensor({5}, rng);
  const Tensor a = random_tensor({4, 3}, rng);
  const Tensor got = eval_gcl(set, p, a);
  const Mat want = gcl_oracle(to_mat(set[p.graph].value), to_mat(a),
                              to_mat(set[p.weight].value),
                              std::vector<double>(set[p.bias].value.values().begin(),
                                                  set[p.bias].value.values().end()));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t o = 0; o < 5; ++o) EXPECT_NEAR(got.at(i, o), want[i][o], 1e-12);
  }
}

TEST(GclTest, BadShapeRejected) {
  std::mt19937_64 rng(4);
  ParameterSet set;
  const GclParams p = add_gcl(set, "l", 4, 3, 5, ParamGroup::kDiscriminative, rng);
  EXPECT_THROW(eval_gcl(set, p, Tensor({4, 4})), ShapeError);
  EXPECT_THROW(eval_gcl(set, p, Tensor({5, 3})), ShapeError);
}

// f(aA1 + bA2) = a f(A1) + b f(A2) - (a + b - 1) bias.
TEST(GclPropertyTest, AffineInActivation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    ParameterSet set;
    const GclParams p = add_gcl(set, "l", 5, 4, 3, ParamGroup::kDiscriminative, rng);
    set[p.bias].value = random_tensor({3}, rng);
    const Tensor a1 = random_tensor({5, 4}, rng), a2 = random_tensor({5, 4}, rng);
    const double alpha = u(rng), beta = u(rng);
    Tensor mix({5, 4});
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a1[i] + beta * a2[i];
    const Tensor f1 = eval_gcl(set, p, a1), f2 = eval_gcl(set, p, a2);
    const Tensor fm = eval_gcl(set, p, mix);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t o = 0; o < 3; ++o) {
        const double want = alpha * f1.at(i, o) + beta * f2.at(i, o) -
                            (alpha + beta - 1.0) * set[p.bias].value[o];
        EXPECT_NEAR(fm.at(i, o), want, 1e-10);
      }
    }
  }
}

TEST(GcbTest, ZeroLayersAreAPureResidual) {
  std::mt19937_64 rng(6);
  ParameterSet set;
  const GcbParams p = add_gcb(set, "b", 5, 4, 0.5, ParamGroup::kDiscriminative, rng);
  zero_gcb(set, p);
  const Tensor a = random_tensor({3, 5, 4}, rng);
  Graph g;
  BoundParameters bound(g, set, false);
  ForwardContext ctx{g, bound, Mode::kEval, 1e-5, {}};
  EXPECT_TRUE(bit_identical(g.evaluate(gcb_forward(ctx, p, g.constant(a), nullptr)), a));
}

TEST(GcbTest, TrainMatchesEvalWithoutDropoutAndFrozenStatistics) {
  std::mt19937_64 rng(7);
  ParameterSet set;
  GcbParams p = add_gcb(set, "b", 4, 6, 0.0, ParamGroup::kDiscriminative, rng);
  const Tensor a = random_tensor({8, 4, 6}, rng);
  // Copy the batch statistics of a training pass into the running buffers
  // so that eval-mode normalisation sees the same moments.
  for (std::size_t layer = 0; layer < 2; ++layer) {
    Graph g;
    BoundParameters bound(g, set, false);
    ForwardContext ctx{g, bound, Mode::kTrain, 1e-5, {}};
    Var x = g.constant(a);
    if (layer == 1) {
      x = gcl_stack_forward(ctx, p.layers[0], p.norms[0], 0.0, x, nullptr);
    }
    Var bn = batch_norm_forward(ctx, p.norms[layer], gcl_forward(ctx, p.layers[layer], x));
    g.evaluate(bn);
    set[p.norms[layer].running_mean].value = g.batch_mean(bn);
    set[p.norms[layer].running_var].value = g.batch_var(bn);
  }
  auto run = [&](Mode mode) {
    Graph g;
    BoundParameters bound(g, set, false);
    ForwardContext ctx{g, bound, mode, 1e-5, {}};
    return g.evaluate(gcb_forward(ctx, p, g.constant(a), nullptr));
  };
  EXPECT_LE(max_abs_diff(run(Mode::kTrain), run(Mode::kEval)), 1e-12);
}

TEST(GcbTest, SeededDropoutReplays) {
  std::mt19937_64 init(8);
  ParameterSet set;
  const GcbParams p = add_gcb(set, "b", 4, 6, 0.5, ParamGroup::kDiscriminative, init);
  const Tensor a = random_tensor({5, 4, 6}, init);
  auto run = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Graph g;
    BoundParameters bound(g, set, false);
    ForwardContext ctx{g, bound, Mode::kTrain, 1e-5, {}};
    return g.evaluate(gcb_forward(ctx, p, g.constant(a), &rng));
  };
  EXPECT_TRUE(bit_identical(run(11), run(11)));
  EXPECT_FALSE(bit_identical(run(11), run(12)));
}

ModelConfig small_config(bool with_vae) {
  ModelConfig c;
  c.gcn.nodes = 6;
  c.gcn.coeffs = 8;
  c.gcn.hidden = 16;
  c.gcn.blocks = 2;
  c.with_vae = with_vae;
  c.vae.latent = 4;
  c.vae.encoder_blocks = 1;
  c.vae.decoder_blocks = 2;
  c.observed = 4;
  c.future = 4;
  return c;
}

TEST(HybridModelTest, ZeroParametersAreTheIdentityOnCoefficients) {
  std::mt19937_64 rng(9);
  for (bool vae : {false, true}) {
    HybridModel model(small_config(vae), 3);
    model.zero_parameters();
    const Tensor c = random_tensor({5, 6, 8}, rng, -3.0, 3.0);
    EXPECT_TRUE(bit_identical(model.predict_coefficients(c), c));
  }
}

std::vector<double> bn_eval(const std::vector<double>& x, const Tensor& gamma,
                            const Tensor& beta, const Tensor& rm, const Tensor& rv,
                            std::size_t offset, double eps) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t f = offset + i;
    y[i] = gamma[f] * (x[i] - rm[f]) / std::sqrt(rv[f] + eps) + beta[f];
  }
  return y;
}

// Eval-mode forward written out by hand from the named tensors.
Mat straight_line_forward(const ParameterSet& set, const Mat& input, std::size_t blocks,
                          double eps) {
  auto t = [&](const std::string& n) -> const Tensor& { return set[*set.find(n)].value; };
  auto vec = [](const Tensor& x) {
    return std::vector<double>(x.values().begin(), x.values().end());
  };
  auto stack = [&](const std::string& gcl, const std::string& bn, const Mat& a) {
    Mat y = gcl_oracle(to_mat(t(gcl + ".S")), a, to_mat(t(gcl + ".W")), vec(t(gcl + ".b")));
    const std::size_t width = y[0].size();
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] = bn_eval(y[k], t(bn + ".gamma"), t(bn + ".beta"), t(bn + ".running_mean"),
                     t(bn + ".running_var"), k * width, eps);
      for (double& v : y[k]) v = std::tanh(v);
    }
    return y;
  };
  Mat h = stack("gcn.input", "gcn.input.bn", input);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::string pre = "gcn.block" + std::to_string(b);
    const Mat y = stack(pre + ".gcl1", pre + ".bn1", stack(pre + ".gcl0", pre + ".bn0", h));
    for (std::size_t k = 0; k < h.size(); ++k) {
      for (std::size_t c = 0; c < h[k].size(); ++c) h[k][c] += y[k][c];
    }
  }
  Mat out = gcl_oracle(to_mat(t("gcn.output.S")), h, to_mat(t("gcn.output.W")),
                       vec(t("gcn.output.b")));
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t c = 0; c < out[k].size(); ++c) out[k][c] += input[k][c];
  }
  return out;
}

TEST(HybridModelTest, TwoBlockForwardMatchesStraightLineEvaluator) {
  std::mt19937_64 rng(10);
  HybridModel model(small_config(false), 4);
  for (auto& p : model.parameters()) {
    const bool var = p.name.find("running_var") != std::string::npos;
    const bool bias = p.name.ends_with(".b") || p.name.find("beta") != std::string::npos ||
                      p.name.find("gamma") != std::string::npos ||
                      p.name.find("running_mean") != std::string::npos;
    if (var) p.value = random_tensor(p.value.shape(), rng, 0.5, 2.0);
    else if (bias) p.value = random_tensor(p.value.shape(), rng, -0.5, 0.5);
  }
  const Tensor c = random_tensor({1, 6, 8}, rng);
  const Tensor got = model.predict_coefficients(c);
  const Mat want = straight_line_forward(model.parameters(), to_mat(c.reshaped({6, 8})), 2,
                                         model.config().bn_eps);
  for (std::size_t k = 0; k < 6; ++k) {
    for (std::size_t m = 0; m < 8; ++m) {
      EXPECT_NEAR(got.at(0, k, m), want[k][m], 1e-12 * std::max(1.0, std::abs(want[k][m])));
    }
  }
}

TEST(HybridModelTest, EvalForwardIsDeterministic) {
  std::mt19937_64 rng(11);
  HybridModel model(small_config(true), 5);
  const Tensor c = random_tensor({300, 6, 8}, rng);
  EXPECT_TRUE(bit_identical(model.predict_coefficients(c), model.predict_coefficients(c)));
  // Chunked inference equals per-sample inference.
  const Tensor all = model.predict_coefficients(c);
  const Tensor one = model.predict_coefficients(
      Tensor({1, 6, 8}, std::vector<double>(c.data() + 299 * 48, c.data() + 300 * 48)));
  for (std::size_t i = 0; i < 48; ++i) EXPECT_EQ(all[299 * 48 + i], one[i]);
}

TEST(HybridModelTest, DiscriminativeInitIndependentOfBranch) {
  HybridModel plain(small_config(false), 42), hybrid(small_config(true), 42);
  for (const auto& p : plain.parameters()) {
    const auto idx = hybrid.parameters().find(p.name);
    ASSERT_TRUE(idx.has_value()) << p.name;
    EXPECT_TRUE(bit_identical(p.value, hybrid.parameters()[*idx].value)) << p.name;
  }
  std::size_t shared = 0;
  for (const auto& p : hybrid.parameters()) shared += p.group == ParamGroup::kDiscriminative;
  EXPECT_EQ(plain.parameters().size(), shared);
}

TEST(HybridModelTest, PredictIsConstantReplicationWhenZeroed) {
  std::mt19937_64 rng(12);
  ModelConfig cfg = small_config(false);
  HybridModel model(cfg, 1);
  model.zero_parameters();
  const Tensor obs = random_tensor({3, 6, 4}, rng);
  const Tensor out = model.predict(obs);
  ASSERT_EQ(out.shape(), (Shape{3, 6, 8}));
  // M = N + T here, so nothing is cropped and the padded window comes back.
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t k = 0; k < 6; ++k) {
      for (std::size_t n = 4; n < 8; ++n) {
        EXPECT_NEAR(out.at(b, k, n), obs.at(b, k, 3), 1e-12);
      }
    }
  }
}

// Independent count: enumerate the layers the architecture is made of.
std::size_t count_by_hand(std::size_t k, std::size_t m, std::size_t h, std::size_t blocks,
                          bool vae, std::size_t nz, std::size_t dec_blocks) {
  auto gcl = [k](std::size_t in, std::size_t out) { return k * k + in * out + out; };
  auto bn = [k](std::size_t w) { return 2 * k * w; };
  std::size_t n = gcl(m, h) + bn(h);
  for (std::size_t i = 0; i < blocks; ++i) n += 2 * (gcl(h, h) + bn(h));
  n += gcl(h, m);
  if (vae) {
    n += (k * h) * (2 * k * nz) + 2 * k * nz;
    n += (k * nz) * (k * h) + k * h;
    for (std::size_t i = 0; i < dec_blocks; ++i) n += 2 * (gcl(h, h) + bn(h));
    n += gcl(h, 2 * m);
  }
  return n;
}

TEST(ParameterCountTest, FullScaleMatchesHandCount) {
  ModelConfig cfg;
  cfg.gcn.nodes = 48;
  cfg.gcn.coeffs = 20;
  cfg.gcn.hidden = 256;
  cfg.gcn.blocks = 12;
  cfg.with_vae = false;
  HybridModel plain(cfg, 0);
  const std::size_t want = count_by_hand(48, 20, 256, 12, false, 0, 0);
  EXPECT_EQ(plain.parameter_count(), want);
  EXPECT_EQ(plain.analytic_parameter_count(), want);

  cfg.with_vae = true;
  cfg.vae.latent = 8;
  HybridModel hybrid(cfg, 0);
  const std::size_t want_vae = count_by_hand(48, 20, 256, 12, true, 8, 6);
  EXPECT_EQ(hybrid.parameter_count(), want_vae);
  EXPECT_EQ(hybrid.analytic_parameter_count(), want_vae);
}

TEST(ModelConfigTest, Validation) {
  ModelConfig c = small_config(true);
  c.gcn.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(true);
  c.gcn.coeffs = 9;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(true);
  c.vae.encoder_blocks = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(true);
  c.gcn.blocks = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  TempDir dir("ckpt");
  std::mt19937_64 rng(13);
  HybridModel model(small_config(true), 6);
  for (auto& p : model.parameters()) p.value = random_tensor(p.value.shape(), rng);
  save_checkpoint(model, dir / "m.ckpt");
  const HybridModel back = load_checkpoint(dir / "m.ckpt");
  ASSERT_EQ(back.parameters().size(), model.parameters().size());
  EXPECT_TRUE(back.has_vae());
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    EXPECT_EQ(back.parameters()[i].name, model.parameters()[i].name);
    EXPECT_TRUE(bit_identical(back.parameters()[i].value, model.parameters()[i].value));
    EXPECT_EQ(back.parameters()[i].group, model.parameters()[i].group);
    EXPECT_EQ(back.parameters()[i].kind, model.parameters()[i].kind);
  }
  EXPECT_EQ(back.config().observed, 4u);
  EXPECT_EQ(back.config().vae.latent, 4u);
}

TEST(CheckpointTest, PredictionOnlyLoadSkipsGenerativeTensors) {
  TempDir dir("ckpt");
  HybridModel model(small_config(true), 7);
  save_checkpoint(model, dir / "m.ckpt");
  const HybridModel pred = load_checkpoint(dir / "m.ckpt", {.prediction_only = true});
  EXPECT_FALSE(pred.has_vae());
  for (const auto& p : pred.parameters()) EXPECT_EQ(p.group, ParamGroup::kDiscriminative);
  std::mt19937_64 rng(1);
  const Tensor c = random_tensor({2, 6, 8}, rng);
  EXPECT_TRUE(bit_identical(pred.predict_coefficients(c), model.predict_coefficients(c)));
}

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST(CheckpointTest, DamagedFilesAreRejected) {
  TempDir dir("ckpt");
  HybridModel model(small_config(true), 8);
  save_checkpoint(model, dir / "m.ckpt");
  const std::vector<char> good = read_bytes(dir / "m.ckpt");

  std::vector<char> cut(good.begin(), good.begin() + good.size() / 2);
  write_bytes(dir / "cut.ckpt", cut);
  EXPECT_THROW(load_checkpoint(dir / "cut.ckpt"), CheckpointError);

  std::vector<char> magic = good;
  magic[0] = 'X';
  write_bytes(dir / "magic.ckpt", magic);
  EXPECT_THROW(load_checkpoint(dir / "magic.ckpt"), CheckpointError);

  std::vector<char> version = good;
  version[8] = 9;
  write_bytes(dir / "version.ckpt", version);
  EXPECT_THROW(load_checkpoint(dir / "version.ckpt"), CheckpointError);

  std::vector<char> flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  write_bytes(dir / "flip.ckpt", flipped);
  EXPECT_THROW(load_checkpoint(dir / "flip.ckpt"), CheckpointError);

  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), IoError);
}

TEST(CheckpointTest, AdoptingTensorsChecksShapes) {
  HybridModel a(small_config(false), 1);
  ModelConfig wider = small_config(false);
  wider.gcn.hidden = 17;
  EXPECT_THROW(HybridModel(wider, a.parameters()), CheckpointError);
  EXPECT_THROW(HybridModel(small_config(true), a.parameters()), CheckpointError);
}

}  // namespace
}  // namespace motionood
