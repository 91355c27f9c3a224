//
// Copyright 2026 The gapanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "gapanon/pipeline.h"
#include "gapanon/strings.h"

namespace gapanon {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitMissing = 3;

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kOutOfRange:
      return kExitValidation;
    case absl::StatusCode::kNotFound:
      return kExitMissing;
    default:
      return kExitFailure;
  }
}

int Report(const absl::Status& status) {
  if (!status.ok()) std::cerr << "error: " << status << "\n";
  return ExitCodeFor(status);
}

void AddCorpusFlags(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--corpus", args.corpus_paths, "GAP TSV files")
      ->required()
      ->expected(1, -1);
  cmd->add_option("--corrections", args.corrections_path,
                  "Label corrections TSV (ID, label)");
}

void AddEmbeddingFlags(CLI::App* cmd, EmbeddingArgs& args) {
  cmd->add_option("--embeddings", args.embeddings_path,
                  "Embedding store (JSONL or binary); stub when omitted");
  cmd->add_option("--stub-dim", args.stub_dim, "Stub embedding width");
}

void AddClipFlag(CLI::App* cmd, double& clip) {
  cmd->add_option("--clip", clip, "Probability floor, 0 disables")
      ->check(CLI::Range(0.0, 1.0 / 3.0));
}

absl::StatusOr<ClipThreshold> MakeClip(double value) {
  return ClipThreshold::Create(value);
}

// Flag values that override the per-head defaults when given.
struct SpecOverrides {
  std::string kind = "end2end";
  std::string name;
  std::vector<int> layers;
  std::vector<int> hidden;
  std::string activation;
  int seeds = 0;
  int linguistic_dim = -1;
  double learning_rate = 0.0;
  int epochs = -1;
  int batch_size = 0;
};

absl::StatusOr<ModelSpec> BuildSpec(const SpecOverrides& o) {
  absl::StatusOr<ModelKind> kind = ParseModelKind(o.kind);
  if (!kind.ok()) return kind.status();
  ModelSpec spec = ModelSpec::Default(*kind);
  if (!o.name.empty()) spec.name = o.name;
  if (!o.layers.empty()) spec.layers = o.layers;
  if (!o.hidden.empty()) spec.hidden = o.hidden;
  if (o.activation == "identity") {
    spec.activation = Activation::kIdentity;
  } else if (!o.activation.empty() && o.activation != "relu") {
    return absl::InvalidArgumentError(
        str::Cat("unknown activation: ", o.activation));
  }
  if (o.seeds > 0) spec.seeds = o.seeds;
  if (o.linguistic_dim >= 0) spec.linguistic_dim = o.linguistic_dim;
  if (o.learning_rate > 0.0) spec.train.learning_rate = o.learning_rate;
  if (o.epochs >= 0) spec.train.epochs = o.epochs;
  if (o.batch_size > 0) spec.train.batch_size = o.batch_size;
  if (absl::Status s = ValidateTrainConfig(spec.train); !s.ok()) return s;
  return spec;
}

void PrintJson(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace
}  // namespace gapanon

int main(int argc, char** argv) {
  using namespace gapanon;  // NOLINT(build/namespaces)

  CLI::App app{"Pronoun resolution toolkit with name anonymization"};
  app.set_config("--config", "", "TOML configuration file");
  app.require_subcommand(1);
  uint64_t seed = 0;
  app.add_option("--seed", seed, "Global seed")->capture_default_str();
  bool cond1_all_names = false;
  app.add_flag("--cond1-all-names", cond1_all_names,
               "Skip a set when any of its four names already occurs");

  // augment
  AugmentArgs augment;
  CLI::App* augment_cmd =
      app.add_subcommand("augment", "Expand a corpus into anonymized variants");
  AddCorpusFlags(augment_cmd, augment.corpus);
  augment_cmd->add_option("--out", augment.out_dir, "Output directory");
  augment_cmd->add_flag("--features", augment.write_features,
                        "Also write hand features per variant");

  // extract-stub
  ExtractStubArgs extract;
  CLI::App* extract_cmd = app.add_subcommand(
      "extract-stub", "Write deterministic stub embeddings for variants");
  extract_cmd
      ->add_option("--variants", extract.variants_path,
                   "Variants JSONL from augment")
      ->required();
  extract_cmd
      ->add_option("--layers", extract.layers,
                   "Layer indices, negative from the top")
      ->expected(1, -1);
  extract_cmd->add_option("--dim", extract.dim, "Vector width");
  extract_cmd->add_flag("--binary", extract.binary, "Binary store format");
  extract_cmd->add_option("--out", extract.out_path, "Embedding store path")
      ->required();

  // train
  TrainArgs train;
  SpecOverrides overrides;
  double train_clip = ClipThreshold::kDefault;
  bool no_augment = false;
  bool no_tta = false;
  CLI::App* train_cmd =
      app.add_subcommand("train", "K-fold training with out-of-fold report");
  AddCorpusFlags(train_cmd, train.corpus);
  AddEmbeddingFlags(train_cmd, train.embeddings);
  train_cmd->add_option("--model", overrides.kind, "end2end or pure_bert");
  train_cmd->add_option("--name", overrides.name, "Model name");
  train_cmd
      ->add_option("--layers", overrides.layers,
                   "Embedding layers to concatenate")
      ->expected(1, -1);
  train_cmd->add_option("--hidden", overrides.hidden, "Hidden layer widths")
      ->expected(1, -1);
  train_cmd->add_option("--activation", overrides.activation,
                        "relu or identity");
  train_cmd->add_option("--seeds", overrides.seeds, "Nets per fold, averaged");
  train_cmd->add_option("--linguistic-dim", overrides.linguistic_dim,
                        "Linguistic feature width");
  train_cmd->add_option("--lr", overrides.learning_rate, "SGD learning rate");
  train_cmd->add_option("--epochs", overrides.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", overrides.batch_size, "Minibatch size");
  train_cmd->add_option("--folds", train.cv.folds, "Cross-validation folds");
  train_cmd->add_flag("--no-augment", no_augment,
                      "Train on original texts only");
  train_cmd->add_flag("--no-tta", no_tta,
                      "Predict from the original text only");
  AddClipFlag(train_cmd, train_clip);
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();

  // predict
  PredictArgs predict;
  double predict_clip = ClipThreshold::kDefault;
  bool predict_no_tta = false;
  CLI::App* predict_cmd = app.add_subcommand(
      "predict", "Ensemble trained models into a submission");
  AddCorpusFlags(predict_cmd, predict.corpus);
  AddEmbeddingFlags(predict_cmd, predict.embeddings);
  predict_cmd
      ->add_option("--models", predict.model_dirs, "Trained model directories")
      ->required()
      ->expected(1, -1);
  predict_cmd
      ->add_option("--weights", predict.weights, "Per-model ensemble weights")
      ->expected(1, -1);
  predict_cmd->add_flag("--no-tta", predict_no_tta,
                        "Predict from the original text only");
  AddClipFlag(predict_cmd, predict_clip);
  predict_cmd->add_option("--out", predict.out_path, "Submission CSV")
      ->required();

  // evaluate
  EvaluateArgs evaluate;
  double evaluate_clip = 0.0;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "Score submissions: overall, feminine, masculine, bias");
  AddCorpusFlags(evaluate_cmd, evaluate.corpus);
  evaluate_cmd
      ->add_option("--predictions", evaluate.prediction_paths,
                   "Submission CSVs")
      ->required()
      ->expected(1, -1);
  evaluate_cmd
      ->add_option("--weights", evaluate.weights, "Per-file ensemble weights")
      ->expected(1, -1);
  AddClipFlag(evaluate_cmd, evaluate_clip);
  evaluate_cmd->add_option("--out", evaluate.out_path, "Report JSON");

  // bootstrap
  BootstrapArgs bootstrap;
  double bootstrap_clip = 0.0;
  double reference = -1.0;
  bool bootstrap_serial = false;
  CLI::App* bootstrap_cmd = app.add_subcommand(
      "bootstrap", "Resample scored rows to estimate score spread");
  AddCorpusFlags(bootstrap_cmd, bootstrap.corpus);
  bootstrap_cmd
      ->add_option("--predictions", bootstrap.predictions_path,
                   "Submission CSV")
      ->required();
  bootstrap_cmd->add_option("--sample-size", bootstrap.options.sample_size,
                            "Rows per resample");
  bootstrap_cmd->add_option("--iterations", bootstrap.options.iterations,
                            "Number of resamples");
  bootstrap_cmd->add_option("--reference", reference,
                            "Score to compare resamples against");
  bootstrap_cmd->add_flag("--serial", bootstrap_serial,
                          "Use the serial kernel");
  AddClipFlag(bootstrap_cmd, bootstrap_clip);
  bootstrap_cmd->add_option("--out", bootstrap.out_path, "Summary JSON");

  // report-lengths
  ReportLengthsArgs lengths;
  CLI::App* lengths_cmd = app.add_subcommand(
      "report-lengths", "Histogram of document lengths in characters");
  AddCorpusFlags(lengths_cmd, lengths.corpus);
  lengths_cmd->add_option("--bin-width", lengths.bin_width,
                          "Bin width in characters");
  lengths_cmd->add_option("--out", lengths.out_path, "Histogram CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const AnonymizerOptions anonymizer{.cond1_all_names = cond1_all_names};

  if (*augment_cmd) {
    augment.anonymizer = anonymizer;
    absl::StatusOr<CoverageReport> coverage = RunAugment(augment);
    if (!coverage.ok()) return Report(coverage.status());
    PrintJson(coverage->ToJson());
    return kExitOk;
  }
  if (*extract_cmd) {
    extract.seed = seed;
    return Report(RunExtractStub(extract));
  }
  if (*train_cmd) {
    absl::StatusOr<ModelSpec> spec = BuildSpec(overrides);
    if (!spec.ok()) return Report(spec.status());
    absl::StatusOr<ClipThreshold> clip = MakeClip(train_clip);
    if (!clip.ok()) return Report(clip.status());
    train.spec = *spec;
    train.anonymizer = anonymizer;
    train.embeddings.stub_seed = seed;
    train.cv.seed = seed;
    train.cv.augment_train = !no_augment;
    train.cv.tta = !no_tta;
    train.clip = *clip;
    absl::StatusOr<EvalReport> report = RunTrain(train);
    if (!report.ok()) return Report(report.status());
    PrintJson(report->ToJson());
    return kExitOk;
  }
  if (*predict_cmd) {
    absl::StatusOr<ClipThreshold> clip = MakeClip(predict_clip);
    if (!clip.ok()) return Report(clip.status());
    predict.anonymizer = anonymizer;
    predict.embeddings.stub_seed = seed;
    predict.tta = !predict_no_tta;
    predict.clip = *clip;
    return Report(RunPredict(predict));
  }
  if (*evaluate_cmd) {
    absl::StatusOr<ClipThreshold> clip = MakeClip(evaluate_clip);
    if (!clip.ok()) return Report(clip.status());
    evaluate.clip = *clip;
    absl::StatusOr<EvalReport> report = RunEvaluate(evaluate);
    if (!report.ok()) return Report(report.status());
    PrintJson(report->ToJson());
    return kExitOk;
  }
  if (*bootstrap_cmd) {
    absl::StatusOr<ClipThreshold> clip = MakeClip(bootstrap_clip);
    if (!clip.ok()) return Report(clip.status());
    bootstrap.clip = *clip;
    bootstrap.options.seed = seed;
    bootstrap.options.parallel = !bootstrap_serial;
    if (reference >= 0.0) bootstrap.options.reference = reference;
    absl::StatusOr<BootstrapSummary> summary = RunBootstrap(bootstrap);
    if (!summary.ok()) return Report(summary.status());
    PrintJson(summary->ToJson());
    return kExitOk;
  }
  if (*lengths_cmd) return Report(RunReportLengths(lengths));
  return kExitValidation;
}
