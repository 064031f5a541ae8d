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

// Command-line entry point: train, benchmark, classify, latents, grad-check.
//
// Every run starts from a preset, applies an optional config file, then the
// command-line overrides, and writes the fully resolved configuration as
// config.ini into its output directory. Re-running with
// `--config <out>/config.ini` reproduces the outputs.

#include <cstdint>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motionood/checkpoint.hpp"
#include "motionood/classifier.hpp"
#include "motionood/error.hpp"
#include "motionood/grad_check.hpp"
#include "motionood/latents.hpp"
#include "motionood/ood_benchmark.hpp"
#include "motionood/result_table.hpp"
#include "motionood/run_config.hpp"
#include "motionood/trainer.hpp"

namespace fs = std::filesystem;
using namespace motionood;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string config_path;
  std::string preset;
  std::string data_root;
  std::string output_dir;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> p_drop;
  std::optional<std::size_t> epochs;
  std::vector<std::string> overrides;  // section.key=value
};

RunConfig resolve(const Options& o) {
  std::optional<IniDocument> file;
  std::string preset = "synthetic";
  if (!o.config_path.empty()) {
    file = IniDocument::load(o.config_path);
    if (const auto* p = file->get("run", "preset")) preset = *p;
  }
  if (!o.preset.empty()) preset = o.preset;
  RunConfig cfg = preset_config(preset);
  if (file) apply_ini(cfg, *file);
  cfg.preset = preset;
  if (!o.data_root.empty()) cfg.data_root = o.data_root;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (!o.checkpoint.empty()) cfg.checkpoint = o.checkpoint;
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.lambda) cfg.train.loss.lambda = *o.lambda;
  if (o.p_drop) cfg.model.gcn.dropout = *o.p_drop;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

// Aligns the model with the data it will see.
void fit_to_dataset(RunConfig& cfg, const MotionDataset& ds) {
  cfg.model.gcn.nodes = ds.joints();
  if (cfg.preset == "synthetic") cfg.synthetic.joints = ds.joints();
}

void prepare_output(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::ofstream out(cfg.output_dir / "config.ini");
  if (!out) throw IoError("cannot write '" + (cfg.output_dir / "config.ini").string() + "'");
  out << to_ini(cfg).to_string();
}

struct Prepared {
  MotionDataset dataset;
  OodSplit split;
};

Prepared prepare_data(RunConfig& cfg) {
  Prepared p;
  p.dataset = load_run_dataset(cfg);
  fit_to_dataset(cfg, p.dataset);
  cfg.validate();
  p.split = make_ood_split(p.dataset, resolve_split(cfg));
  return p;
}

int cmd_train(RunConfig cfg) {
  cfg.validate();
  Prepared p = prepare_data(cfg);
  prepare_output(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const std::size_t n = cfg.model.observed, t = cfg.model.future;
  const WindowSet train = make_windows(p.split.train, n, t, cfg.benchmark.train_stride);
  WindowSet val;
  if (!p.split.validation.empty()) {
    val = make_windows(p.split.validation, n, t, cfg.benchmark.train_stride);
  }
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  tc.representation = cfg.representation;
  HybridModel model(cfg.model, seed);
  std::printf("training: %zu windows, %zu validation, %zu parameters\n", train.size(),
              val.size(), model.parameter_count());
  const TrainResult r = motionood::train(model, train, val.size() ? &val : nullptr, tc);
  save_checkpoint(model, cfg.output_dir / "model.ckpt");
  write_loss_log(r.log, cfg.output_dir / "loss_log.csv");
  std::printf("steps: %zu  final disc loss: %.6g", r.stats.steps,
              r.log.empty() ? 0.0 : r.log.back().disc_loss);
  if (r.best_epoch) {
    std::printf("  best epoch: %zu (validation %.6g)", *r.best_epoch,
                r.validation_error[*r.best_epoch]);
  }
  std::printf("\nwrote %s\n", (cfg.output_dir / "model.ckpt").string().c_str());
  return kExitOk;
}

int cmd_benchmark(RunConfig cfg) {
  cfg.validate();
  Prepared p = prepare_data(cfg);
  if (cfg.benchmark.metric != HorizonMetric::kMpjpe &&
      cfg.representation == Representation::kCartesian3d) {
    cfg.benchmark.metric = HorizonMetric::kMpjpe;
  }
  prepare_output(cfg);

  struct Variant {
    std::string tag;
    double lambda;
    double p_drop;
  };
  std::vector<Variant> variants = {
      {cfg.benchmark.model_tag, cfg.train.loss.lambda, cfg.model.gcn.dropout}};
  if (cfg.compare_plain) variants.push_back({"plain", cfg.plain_lambda, cfg.plain_dropout});

  std::vector<BenchmarkResult> rows, averages;
  std::size_t failed_runs = 0, total_runs = 0;
  for (const auto& v : variants) {
    ModelConfig mc = cfg.model;
    mc.gcn.dropout = v.p_drop;
    TrainConfig tc = cfg.train;
    tc.loss.lambda = v.lambda;
    tc.representation = cfg.representation;
    BenchmarkConfig bc = cfg.benchmark;
    bc.model_tag = v.tag;
    std::printf("[%s] lambda=%g p_drop=%g seeds=%zu\n", v.tag.c_str(), v.lambda, v.p_drop,
                cfg.seeds.size());
    const BenchmarkRun run = run_benchmark(p.split, mc, tc, bc, cfg.seeds);
    for (const auto& f : run.failures) {
      std::fprintf(stderr, "[%s] seed %llu failed: %s\n", v.tag.c_str(),
                   static_cast<unsigned long long>(f.seed), f.message.c_str());
    }
    for (const auto& s : run.seeds) {
      write_loss_log(s.training.log, cfg.output_dir / ("loss_" + v.tag + "_seed" +
                                                       std::to_string(s.seed) + ".csv"));
    }
    rows.insert(rows.end(), run.rows.begin(), run.rows.end());
    averages.insert(averages.end(), run.ood_average.begin(), run.ood_average.end());
    failed_runs += run.failures.size();
    total_runs += cfg.seeds.size();
  }
  if (failed_runs == total_runs) {
    std::fprintf(stderr, "every seed failed\n");
    return kExitRuntime;
  }
  std::vector<BenchmarkResult> all = rows;
  all.insert(all.end(), averages.begin(), averages.end());
  const auto agg = aggregate_seeds(all);
  write_seed_results_csv(all, cfg.output_dir / "results_per_seed.csv");
  emit_table(agg, TableFormat::kCsv, cfg.output_dir / "results.csv");
  emit_table(agg, TableFormat::kAlignedText, cfg.output_dir / "results.txt");
  std::cout << format_aligned_table(agg);
  std::printf("wrote %s\n", (cfg.output_dir / "results.csv").string().c_str());
  return kExitOk;
}

int cmd_classify(RunConfig cfg) {
  cfg.validate();
  Prepared p = prepare_data(cfg);
  prepare_output(cfg);
  const SplitSpec spec = resolve_split(cfg);
  const std::string eval_subject =
      cfg.classifier.eval_subject.empty() ? spec.test_subject : cfg.classifier.eval_subject;
  const std::size_t n = cfg.model.observed, t = cfg.model.future;
  const std::size_t stride = cfg.classifier.stride == 0 ? t : cfg.classifier.stride;

  std::vector<MotionSequence> train_seqs, test_seqs;
  for (const auto& s : p.dataset.sequences) {
    const bool is_train = std::find(spec.train_subjects.begin(), spec.train_subjects.end(),
                                    s.subject) != spec.train_subjects.end();
    if (s.subject == eval_subject) test_seqs.push_back(s);
    else if (is_train) train_seqs.push_back(s);
  }
  if (train_seqs.empty() || test_seqs.empty()) {
    throw UsageError("classify: no training or evaluation sequences for the chosen subjects");
  }
  const std::vector<std::string> classes = p.dataset.actions();
  const LabeledWindows train = encode_for_classifier(make_windows(train_seqs, n, t, stride),
                                                     cfg.model.gcn.coeffs, classes);
  const LabeledWindows test = encode_for_classifier(make_windows(test_seqs, n, t, stride),
                                                    cfg.model.gcn.coeffs, classes);
  ClassifierConfig cc;
  cc.input_dim = train.inputs.dim(1);
  cc.classes = classes.size();
  cc.dropout = cfg.classifier.dropout;
  cc.batch_size = cfg.classifier.batch_size;
  cc.learning_rate = cfg.classifier.learning_rate;
  cc.epochs = cfg.classifier.epochs;
  cc.seed = cfg.seeds.front();
  ClassifierTrainLog log;
  const Classifier clf = train_classifier(train, cc, &log);
  const ConfusionMatrix m = confusion_matrix(clf, test);
  write_confusion_csv(m, classes, cfg.output_dir / "confusion.csv");
  const auto pr = precision_recall(m);

  std::ofstream report(cfg.output_dir / "precision_recall.csv");
  report << "class,precision,recall,support\n";
  std::printf("train accuracy %.4f on %zu windows; evaluating %zu windows of %s\n",
              log.train_accuracy, train.size(), test.size(), eval_subject.c_str());
  std::printf("%-24s %9s %9s %8s\n", "class", "precision", "recall", "support");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::size_t support = 0;
    for (std::size_t v : m[c]) support += v;
    auto show = [](const std::optional<double>& v) {
      return v ? std::to_string(*v) : std::string("undefined");
    };
    std::printf("%-24s %9s %9s %8zu%s\n", classes[c].c_str(), show(pr[c].precision).c_str(),
                show(pr[c].recall).c_str(), support, classes[c] == spec.id_action ? "  (ID)" : "");
    report << classes[c] << ',' << show(pr[c].precision) << ',' << show(pr[c].recall) << ','
           << support << '\n';
  }
  return kExitOk;
}

int cmd_latents(RunConfig cfg) {
  if (cfg.checkpoint.empty()) throw ConfigError("latents: --checkpoint is required");
  HybridModel model = load_checkpoint(cfg.checkpoint);
  if (!model.has_vae()) {
    throw UsageError("checkpoint '" + cfg.checkpoint +
                     "' has no generative (VAE) branch; latents need it");
  }
  cfg.model = model.config();
  cfg.validate();
  Prepared p = prepare_data(cfg);
  if (p.dataset.joints() != model.config().gcn.nodes) {
    throw ShapeError("checkpoint expects K=" + std::to_string(model.config().gcn.nodes) +
                     " but the dataset has K=" + std::to_string(p.dataset.joints()));
  }
  prepare_output(cfg);
  std::vector<MotionSequence> seqs = p.split.test_id;
  for (const auto& [action, s] : p.split.test_ood) seqs.insert(seqs.end(), s.begin(), s.end());
  const std::size_t t = cfg.model.future;
  const WindowSet windows = make_windows(seqs, cfg.model.observed, t, t);
  const auto records = extract_latents(model, windows);
  export_latents_csv(records, cfg.output_dir / "latents.csv");
  const Projection proj = project_pca_2d(records);
  export_projection_csv(proj, cfg.output_dir / "projection.csv");
  std::printf("%zu latent vectors of length %zu; PCA variance %.6g, %.6g of %.6g\n",
              records.size(), records.front().z.size(), proj.component_variance[0],
              proj.component_variance[1], proj.total_variance);
  return kExitOk;
}

int cmd_grad_check(RunConfig cfg) {
  const std::uint64_t seed = cfg.seeds.front();
  ModelConfig mc;
  mc.gcn.nodes = 6;
  mc.gcn.coeffs = 8;
  mc.gcn.hidden = 16;
  mc.gcn.blocks = 2;
  mc.vae.latent = 4;
  mc.vae.encoder_blocks = 1;
  mc.vae.decoder_blocks = 2;
  mc.observed = 4;
  mc.future = 4;
  bool ok = true;
  for (double lambda : {0.0, 0.003, 1.0}) {
    const GradCheckReport rep = hybrid_grad_check(mc, lambda, seed, {});
    std::printf("lambda=%-6g leaves=%zu max_rel_error=%.3e %s\n", lambda, rep.leaves.size(),
                rep.max_rel_error(), rep.passed() ? "PASS" : "FAIL");
    for (const auto& leaf : rep.leaves) {
      if (!leaf.passed) std::printf("  %s: rel %.3e\n", leaf.name.c_str(), leaf.max_rel_error);
    }
    ok = ok && rep.passed();
  }
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human motion prediction with a generative branch, OoD benchmark tools"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config_path, "Config file (section/key = value)")
        ->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "synthetic | h36m-walking | cmu-basketball | custom");
    sub->add_option("--data-root", o.data_root, "Dataset root <root>/<subject>/<action>_<trial>.txt");
    sub->add_option("-o,--output", o.output_dir, "Output directory");
    sub->add_option("--seed", o.seed, "Seed; replaces the configured seed list");
    sub->add_option("--set", o.overrides, "Override, e.g. --set train.epochs=5")->take_all();
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--lambda", o.lambda, "Weight of the generative term");
    sub->add_option("--p-drop", o.p_drop, "Dropout probability");
    sub->add_option("--epochs", o.epochs, "Training epochs");
  };

  CLI::App* train = app.add_subcommand("train", "Train one model, write checkpoint and loss log");
  add_common(train);
  add_model(train);
  CLI::App* bench = app.add_subcommand("benchmark", "Train per seed and evaluate ID/OoD actions");
  add_common(bench);
  add_model(bench);
  CLI::App* classify = app.add_subcommand("classify", "Action separability classifier");
  add_common(classify);
  CLI::App* latents = app.add_subcommand("latents", "Export latent means and a 2D PCA projection");
  add_common(latents);
  latents->add_option("--checkpoint", o.checkpoint, "Checkpoint with a VAE branch");
  CLI::App* grad = app.add_subcommand("grad-check", "Finite-difference check of the full network");
  add_common(grad);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = resolve(o);
    if (*train) return cmd_train(cfg);
    if (*bench) return cmd_benchmark(cfg);
    if (*classify) return cmd_classify(cfg);
    if (*latents) return cmd_latents(cfg);
    if (*grad) return cmd_grad_check(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
