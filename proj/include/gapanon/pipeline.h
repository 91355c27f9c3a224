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

#ifndef GAPANON_PIPELINE_H_
#define GAPANON_PIPELINE_H_

// End-to-end orchestration: variant expansion, embedding lookup, k-fold
// training with seed averaging, TTA prediction, ensembling and reporting.
// The CLI subcommands are thin wrappers over the Run* functions at the
// bottom of this header.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gapanon/anonymizer.h"
#include "gapanon/corpus.h"
#include "gapanon/embedding_store.h"
#include "gapanon/ensemble_eval.h"
#include "gapanon/features.h"
#include "gapanon/models.h"
#include "gapanon/training.h"

namespace gapanon {

// Mention vectors for one variant, already concatenated over layers.
class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual absl::StatusOr<std::array<std::vector<double>, 3>> Vectors(
      const AugmentedVariant& variant, std::span<const int> layers) const = 0;
};

class StubEmbeddingSource : public EmbeddingSource {
 public:
  explicit StubEmbeddingSource(StubEmbedder embedder) : embedder_(embedder) {}
  absl::StatusOr<std::array<std::vector<double>, 3>> Vectors(
      const AugmentedVariant& variant,
      std::span<const int> layers) const override;

 private:
  StubEmbedder embedder_;
};

class StoreEmbeddingSource : public EmbeddingSource {
 public:
  explicit StoreEmbeddingSource(EmbeddingStore store)
      : store_(std::move(store)) {}
  absl::StatusOr<std::array<std::vector<double>, 3>> Vectors(
      const AugmentedVariant& variant,
      std::span<const int> layers) const override;
  const EmbeddingStore& store() const { return store_; }

 private:
  EmbeddingStore store_;
};

struct ModelSpec {
  std::string name = "end2end";
  ModelKind kind = ModelKind::kEnd2end;
  std::vector<int> layers = {-4};
  std::vector<int> hidden = {150};
  Activation activation = Activation::kRelu;
  int seeds = 5;
  int linguistic_dim = 0;
  TrainConfig train;

  // Defaults per head: End2end uses layer -4, a 150-wide scorer and 5
  // seeds; Pure BERT uses layers -3 and -4, hidden 512/32 and 1 seed.
  static ModelSpec Default(ModelKind kind);

  nlohmann::json ToJson() const;
  static absl::StatusOr<ModelSpec> FromJson(const nlohmann::json& j);
};

// Model inputs for every included variant of every example, in expansion
// order (index 0 is the original document).
using VariantInputs = std::vector<std::vector<ModelInput>>;

absl::StatusOr<VariantInputs> BuildInputs(
    std::span<const GapExample> examples,
    std::span<const TtaExpansion> expansions, const EmbeddingSource& source,
    const ModelSpec& spec);

struct CvOptions {
  int folds = 5;
  uint64_t seed = 0;
  // Train on every applied variant as its own sample.
  bool augment_train = true;
  // Average predictions over all variants at inference.
  bool tta = true;
  bool parallel = true;
};

struct TrainedNet {
  int fold = 0;
  int seed_index = 0;
  std::unique_ptr<Classifier> net;
  std::vector<double> loss_trace;
};

struct CvResult {
  std::vector<std::vector<size_t>> folds;
  // Out-of-fold predictions, one per example, unclipped.
  std::vector<PredictionTriple> oof;
  // Ordered by (fold, seed).
  std::vector<TrainedNet> nets;
};

absl::StatusOr<CvResult> CrossValidate(std::span<const GapExample> examples,
                                       const VariantInputs& inputs,
                                       const ModelSpec& spec,
                                       const CvOptions& options);

// Average over nets and (optionally) TTA variants for each example.
absl::StatusOr<std::vector<PredictionTriple>> PredictWithNets(
    std::span<const Classifier* const> nets, const VariantInputs& inputs,
    bool tta);

// ----------------------------------------------------------- subcommands

struct CorpusArgs {
  std::vector<std::string> corpus_paths;
  std::string corrections_path;  // optional
};

struct EmbeddingArgs {
  std::string embeddings_path;  // empty: use the stub embedder
  int stub_dim = 32;
  uint64_t stub_seed = 0;
};

struct AugmentArgs {
  CorpusArgs corpus;
  AnonymizerOptions anonymizer;
  std::string out_dir;
  bool write_features = false;
};

struct ExtractStubArgs {
  std::string variants_path;
  std::vector<int> layers = {-3, -4, -5, -6};
  int dim = 32;
  uint64_t seed = 0;
  bool binary = false;
  std::string out_path;
};

struct TrainArgs {
  CorpusArgs corpus;
  EmbeddingArgs embeddings;
  AnonymizerOptions anonymizer;
  ModelSpec spec;
  CvOptions cv;
  ClipThreshold clip = ClipThreshold::Default();
  std::string out_dir;
};

struct PredictArgs {
  CorpusArgs corpus;
  EmbeddingArgs embeddings;
  AnonymizerOptions anonymizer;
  std::vector<std::string> model_dirs;
  std::vector<double> weights;  // empty: uniform
  ClipThreshold clip = ClipThreshold::Default();
  bool tta = true;
  std::string out_path;
};

struct EvaluateArgs {
  CorpusArgs corpus;
  std::vector<std::string> prediction_paths;
  std::vector<double> weights;
  ClipThreshold clip = ClipThreshold::Default();
  std::string out_path;  // report JSON; empty: stdout only
};

struct BootstrapArgs {
  CorpusArgs corpus;
  std::string predictions_path;
  BootstrapOptions options;
  ClipThreshold clip = ClipThreshold::Default();
  std::string out_path;
};

struct ReportLengthsArgs {
  CorpusArgs corpus;
  int64_t bin_width = kDefaultHistogramBinWidth;
  std::string out_path;
};

// Reads, concatenates and (optionally) corrects the corpora.
absl::StatusOr<std::vector<GapExample>> LoadCorpus(const CorpusArgs& args,
                                                   bool apply_corrections);
absl::StatusOr<std::unique_ptr<EmbeddingSource>> OpenEmbeddingSource(
    const EmbeddingArgs& args);

// Ensemble + clip of aligned prediction sets.
absl::StatusOr<std::vector<PredictionTriple>> CombinePredictions(
    const std::vector<std::vector<PredictionTriple>>& per_model,
    std::span<const double> weights, ClipThreshold clip);

absl::StatusOr<CoverageReport> RunAugment(const AugmentArgs& args);
absl::Status RunExtractStub(const ExtractStubArgs& args);
absl::StatusOr<EvalReport> RunTrain(const TrainArgs& args);
absl::Status RunPredict(const PredictArgs& args);
absl::StatusOr<EvalReport> RunEvaluate(const EvaluateArgs& args);
absl::StatusOr<BootstrapSummary> RunBootstrap(const BootstrapArgs& args);
absl::Status RunReportLengths(const ReportLengthsArgs& args);

}  // namespace gapanon

#endif  // GAPANON_PIPELINE_H_
