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

#include "gapanon/pipeline.h"

#include <cmath>
#include <filesystem>

#include "gapanon/parallel.h"
#include "gtest/gtest.h"
#include "testing/synthetic.h"

namespace gapanon {
namespace {

namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    corpus_ = testing::ContextTaskCorpus(60, 3);
    corpus_path_ = Path("corpus.tsv");
    ASSERT_TRUE(WriteStringToFile(corpus_path_, SerializeGapTsv(corpus_)).ok());
  }

  std::string Path(std::string_view name) const {
    return (dir_ / std::string(name)).string();
  }

  TrainArgs SmallTrain(ModelKind kind, std::string out) const {
    TrainArgs args;
    args.corpus.corpus_paths = {corpus_path_};
    args.embeddings.stub_dim = 8;
    args.spec = ModelSpec::Default(kind);
    args.spec.hidden = kind == ModelKind::kPureBert ? std::vector<int>{16, 8}
                                                    : std::vector<int>{8};
    args.spec.seeds = 2;
    args.spec.train = {.learning_rate = 0.05, .epochs = 4, .batch_size = 16};
    args.cv.folds = 3;
    args.cv.seed = 11;
    args.out_dir = Path(out);
    return args;
  }

  fs::path dir_;
  std::vector<GapExample> corpus_;
  std::string corpus_path_;
};

TEST_F(PipelineTest, AugmentWritesVariantsAndCoverage) {
  AugmentArgs args;
  args.corpus.corpus_paths = {corpus_path_};
  args.out_dir = Path("aug");
  args.write_features = true;
  absl::StatusOr<CoverageReport> coverage = RunAugment(args);
  ASSERT_TRUE(coverage.ok()) << coverage.status();
  EXPECT_EQ(coverage->examples, 60u);
  EXPECT_EQ(coverage->all_sets_applied, 60u);
  const std::string jsonl = *ReadFileToString(Path("aug/variants.jsonl"));
  EXPECT_EQ(ParseVariantsJsonl(jsonl)->size(), 300u);
  EXPECT_TRUE(fs::exists(Path("aug/coverage.json")));
  EXPECT_TRUE(fs::exists(Path("aug/features.csv")));
}

TEST_F(PipelineTest, ExtractStubOutputFeedsTraining) {
  AugmentArgs augment;
  augment.corpus.corpus_paths = {corpus_path_};
  augment.out_dir = Path("aug");
  ASSERT_TRUE(RunAugment(augment).ok());
  for (bool binary : {false, true}) {
    ExtractStubArgs extract;
    extract.variants_path = Path("aug/variants.jsonl");
    extract.dim = 8;
    extract.binary = binary;
    extract.out_path = Path(binary ? "emb.bin" : "emb.jsonl");
    ASSERT_TRUE(RunExtractStub(extract).ok());
    absl::StatusOr<EmbeddingStore> store =
        EmbeddingStore::Load(extract.out_path);
    ASSERT_TRUE(store.ok()) << store.status();
    EXPECT_EQ(store->size(), 60u * 5 * 3);
  }
  // The store and the in-process stub give identical training runs.
  TrainArgs from_store = SmallTrain(ModelKind::kEnd2end, "a");
  from_store.embeddings.embeddings_path = Path("emb.bin");
  TrainArgs from_stub = SmallTrain(ModelKind::kEnd2end, "b");
  const EvalReport x = *RunTrain(from_store);
  const EvalReport y = *RunTrain(from_stub);
  EXPECT_EQ(x.ToJson(), y.ToJson());
}

TEST_F(PipelineTest, MissingEmbeddingsListKeys) {
  EmbeddingStore store;
  std::vector<TtaExpansion> expansions = *ExpandCorpusSerial(corpus_, {});
  const StubEmbedder stub(4, 0);
  for (const AugmentedVariant& v : expansions[0].variants) {
    absl::StatusOr<std::array<MentionEmbedding, 3>> records =
        stub.Embed(RequestForVariant(v, {-4}));
    ASSERT_TRUE(records.ok());
    for (MentionEmbedding& m : *records) {
      ASSERT_TRUE(store.Insert(std::move(m)).ok());
    }
  }
  const StoreEmbeddingSource source(std::move(store));
  absl::StatusOr<VariantInputs> inputs = BuildInputs(
      corpus_, expansions, source, ModelSpec::Default(ModelKind::kEnd2end));
  ASSERT_EQ(inputs.status().code(), absl::StatusCode::kNotFound);
  EXPECT_NE(inputs.status().message().find(corpus_[1].id + "/0"),
            absl::string_view::npos);
  EXPECT_NE(inputs.status().message().find("295"), absl::string_view::npos);
}

TEST_F(PipelineTest, ZeroEpochsScoresNearLn3) {
  TrainArgs args = SmallTrain(ModelKind::kPureBert, "zero");
  args.spec.train.epochs = 0;
  args.clip = ClipThreshold::None();
  const EvalReport r = *RunTrain(args);
  EXPECT_NEAR(r.overall, std::log(3.0), 0.05);
}

TEST_F(PipelineTest, TrainWritesArtifactsAndIsReproducible) {
  const TrainArgs args = SmallTrain(ModelKind::kEnd2end, "m1");
  const EvalReport first = *RunTrain(args);
  for (const char* f :
       {"spec.json", "oof.csv", "loss_trace.csv", "folds.json",
        "cv_report.json", "model_f0_s0.json", "model_f2_s1.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(args.out_dir) / f)) << f;
  }
  const std::string oof = *ReadFileToString(Path("m1/oof.csv"));
  TrainArgs again = args;
  again.out_dir = Path("m2");
  EXPECT_EQ(RunTrain(again)->ToJson(), first.ToJson());
  EXPECT_EQ(*ReadFileToString(Path("m2/oof.csv")), oof);
  EXPECT_EQ(*ReadFileToString(Path("m2/model_f1_s0.json")),
            *ReadFileToString(Path("m1/model_f1_s0.json")));
}

TEST_F(PipelineTest, PredictMatchesStepByStepComposition) {
  const TrainArgs e2e = SmallTrain(ModelKind::kEnd2end, "e2e");
  const TrainArgs pure = SmallTrain(ModelKind::kPureBert, "pure");
  ASSERT_TRUE(RunTrain(e2e).ok());
  ASSERT_TRUE(RunTrain(pure).ok());

  PredictArgs predict;
  predict.corpus.corpus_paths = {corpus_path_};
  predict.embeddings.stub_dim = 8;
  predict.model_dirs = {e2e.out_dir, pure.out_dir};
  predict.weights = {0.3, 0.7};
  predict.out_path = Path("sub.csv");
  ASSERT_TRUE(RunPredict(predict).ok());
  const std::vector<SubmissionRow> rows =
      *ParseSubmissionCsv(*ReadFileToString(predict.out_path));

  // Oracle: every checkpoint, every variant, plain loops.
  const std::vector<TtaExpansion> expansions = *ExpandCorpusSerial(corpus_, {});
  const StubEmbeddingSource source(StubEmbedder(8, 0));
  std::vector<std::vector<std::array<double, 3>>> per_model;
  for (const TrainArgs* t : {&e2e, &pure}) {
    std::vector<std::unique_ptr<Classifier>> nets;
    for (int f = 0; f < 3; ++f) {
      for (int s = 0; s < 2; ++s) {
        const std::string file = t->out_dir + "/model_f" + std::to_string(f) +
                                 "_s" + std::to_string(s) + ".json";
        nets.push_back(*ClassifierFromJson(
            nlohmann::json::parse(*ReadFileToString(file))));
      }
    }
    const VariantInputs inputs =
        *BuildInputs(corpus_, expansions, source, t->spec);
    std::vector<std::array<double, 3>> out;
    for (const std::vector<ModelInput>& variants : inputs) {
      std::array<double, 3> sum{};
      for (const ModelInput& in : variants) {
        for (const auto& net : nets) {
          const PredictionTriple p = *net->Predict(in);
          for (int c = 0; c < 3; ++c) sum[c] += p.p[c];
        }
      }
      const double total = sum[0] + sum[1] + sum[2];
      for (double& v : sum) v /= total;
      out.push_back(sum);
    }
    per_model.push_back(out);
  }
  ASSERT_EQ(rows.size(), corpus_.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].id, corpus_[i].id);
    for (int c = 0; c < 3; ++c) {
      const double mixed = 0.3 * per_model[0][i][c] + 0.7 * per_model[1][i][c];
      EXPECT_NEAR(rows[i].probs.p[c], std::max(mixed, 0.005), 1e-12);
      EXPECT_GE(rows[i].probs.p[c], 0.005);
    }
  }
}

TEST_F(PipelineTest, EvaluateUniformAndSingleModelWeights) {
  std::vector<SubmissionRow> uniform;
  std::vector<SubmissionRow> skewed;
  for (const GapExample& e : corpus_) {
    uniform.push_back({e.id, PredictionTriple::Uniform()});
    skewed.push_back({e.id, {{0.7, 0.2, 0.1}}});
  }
  ASSERT_TRUE(WriteStringToFile(Path("u.csv"), SubmissionCsv(uniform)).ok());
  ASSERT_TRUE(WriteStringToFile(Path("s.csv"), SubmissionCsv(skewed)).ok());
  EvaluateArgs args;
  args.corpus.corpus_paths = {corpus_path_};
  args.prediction_paths = {Path("u.csv")};
  args.clip = ClipThreshold::None();
  EXPECT_NEAR(RunEvaluate(args)->overall, std::log(3.0), 1e-12);

  args.prediction_paths = {Path("s.csv")};
  const EvalReport alone = *RunEvaluate(args);
  args.prediction_paths = {Path("s.csv"), Path("u.csv")};
  args.weights = {1.0, 0.0};
  EXPECT_EQ(RunEvaluate(args)->ToJson(), alone.ToJson());
  args.weights = {0.5};
  EXPECT_EQ(RunEvaluate(args).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST_F(PipelineTest, EvaluateRejectsMisalignedSubmission) {
  std::vector<SubmissionRow> rows;
  for (const GapExample& e : corpus_) {
    rows.push_back({e.id, PredictionTriple::Uniform()});
  }
  rows.back().id = "unknown";
  ASSERT_TRUE(WriteStringToFile(Path("bad.csv"), SubmissionCsv(rows)).ok());
  rows.pop_back();
  ASSERT_TRUE(WriteStringToFile(Path("short.csv"), SubmissionCsv(rows)).ok());
  EvaluateArgs args;
  args.corpus.corpus_paths = {corpus_path_};
  for (const char* f : {"bad.csv", "short.csv"}) {
    args.prediction_paths = {Path(f)};
    EXPECT_EQ(RunEvaluate(args).status().code(),
              absl::StatusCode::kInvalidArgument);
  }
  args.prediction_paths = {Path("missing.csv")};
  EXPECT_EQ(RunEvaluate(args).status().code(), absl::StatusCode::kNotFound);
}

TEST_F(PipelineTest, BootstrapAndLengths) {
  std::vector<SubmissionRow> rows;
  for (const GapExample& e : corpus_) {
    rows.push_back({e.id, {{0.6, 0.3, 0.1}}});
  }
  ASSERT_TRUE(WriteStringToFile(Path("p.csv"), SubmissionCsv(rows)).ok());
  BootstrapArgs args;
  args.corpus.corpus_paths = {corpus_path_};
  args.predictions_path = Path("p.csv");
  args.options = {.sample_size = 30, .iterations = 100, .seed = 1};
  args.out_path = Path("boot.json");
  const BootstrapSummary s = *RunBootstrap(args);
  EXPECT_EQ(s.iterations, 100);
  EXPECT_TRUE(fs::exists(args.out_path));

  ReportLengthsArgs lengths;
  lengths.corpus.corpus_paths = {corpus_path_};
  lengths.bin_width = 10;
  lengths.out_path = Path("len.csv");
  ASSERT_TRUE(RunReportLengths(lengths).ok());
  EXPECT_TRUE(ReadFileToString(lengths.out_path)->starts_with("bin_start"));
}

TEST_F(PipelineTest, SpecJsonRoundTrip) {
  ModelSpec spec = ModelSpec::Default(ModelKind::kPureBert);
  spec.name = "post";
  spec.layers = {-5, -6};
  spec.activation = Activation::kIdentity;
  spec.train.learning_rate = 0.25;
  const ModelSpec back = *ModelSpec::FromJson(spec.ToJson());
  EXPECT_EQ(back.ToJson(), spec.ToJson());
  EXPECT_FALSE(ModelSpec::FromJson(nlohmann::json::object()).ok());
}

TEST_F(PipelineTest, CombineRejectsLengthMismatch) {
  const std::vector<std::vector<PredictionTriple>> sets = {
      {PredictionTriple::Uniform()}, {}};
  EXPECT_FALSE(CombinePredictions(sets, {}, ClipThreshold::None()).ok());
}

}  // namespace
}  // namespace gapanon
