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

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "absl/container/flat_hash_map.h"
#include "gapanon/parallel.h"
#include "gapanon/random.h"
#include "gapanon/strings.h"

namespace gapanon {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSpecFile = "spec.json";
constexpr size_t kMaxListedKeys = 20;

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        str::Cat("cannot create directory ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

std::string Join(const std::string& dir, std::string_view file) {
  return (fs::path(dir) / fs::path(file)).string();
}

absl::StatusOr<std::vector<TtaExpansion>> Expand(
    std::span<const GapExample> examples, const AnonymizerOptions& options,
    bool parallel = true) {
  return parallel ? ExpandCorpusParallel(examples, options)
                  : ExpandCorpusSerial(examples, options);
}

std::vector<Label> LabelsOf(std::span<const GapExample> examples) {
  std::vector<Label> labels;
  labels.reserve(examples.size());
  for (const GapExample& e : examples) labels.push_back(e.label());
  return labels;
}

std::vector<std::string> PronounsOf(std::span<const GapExample> examples) {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const GapExample& e : examples) out.push_back(e.pronoun);
  return out;
}

std::string NetFileName(int fold, int seed_index) {
  return str::Cat("model_f", fold, "_s", seed_index, ".json");
}

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path) {
  absl::StatusOr<std::string> contents = ReadFileToString(path);
  if (!contents.ok()) return contents.status();
  nlohmann::json j = nlohmann::json::parse(*contents, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(str::Cat(path, ": invalid JSON"));
  }
  return j;
}

// Predictions from a submission file, aligned to the corpus order.
absl::StatusOr<std::vector<PredictionTriple>> AlignSubmission(
    const std::string& path, std::span<const GapExample> examples) {
  absl::StatusOr<std::string> contents = ReadFileToString(path);
  if (!contents.ok()) return contents.status();
  absl::StatusOr<std::vector<SubmissionRow>> rows =
      ParseSubmissionCsv(*contents);
  if (!rows.ok()) {
    return absl::InvalidArgumentError(
        str::Cat(path, ": ", rows.status().message()));
  }
  absl::flat_hash_map<std::string, PredictionTriple> by_id;
  for (const SubmissionRow& r : *rows) by_id[r.id] = r.probs;
  if (by_id.size() != examples.size()) {
    return absl::InvalidArgumentError(
        str::Cat(path, ": ", by_id.size(), " predictions for ", examples.size(),
                 " corpus rows"));
  }
  std::vector<PredictionTriple> out;
  out.reserve(examples.size());
  for (const GapExample& e : examples) {
    auto it = by_id.find(e.id);
    if (it == by_id.end()) {
      return absl::InvalidArgumentError(
          str::Cat(path, ": no prediction for ", e.id));
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<SubmissionRow> ToRows(std::span<const GapExample> examples,
                                  std::span<const PredictionTriple> preds) {
  std::vector<SubmissionRow> rows;
  rows.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    rows.push_back({examples[i].id, preds[i]});
  }
  return rows;
}

}  // namespace

// ------------------------------------------------------- embedding sources

absl::StatusOr<std::array<std::vector<double>, 3>> StubEmbeddingSource::Vectors(
    const AugmentedVariant& variant, std::span<const int> layers) const {
  absl::StatusOr<std::array<MentionEmbedding, 3>> embedded =
      embedder_.Embed(RequestForVariant(
          variant, std::vector<int>(layers.begin(), layers.end())));
  if (!embedded.ok()) return embedded.status();
  std::array<std::vector<double>, 3> out;
  for (int r = 0; r < 3; ++r) {
    absl::StatusOr<std::vector<double>> v =
        ConcatLayers((*embedded)[r], layers);
    if (!v.ok()) return v.status();
    out[r] = *std::move(v);
  }
  return out;
}

absl::StatusOr<std::array<std::vector<double>, 3>>
StoreEmbeddingSource::Vectors(const AugmentedVariant& variant,
                              std::span<const int> layers) const {
  std::array<std::vector<double>, 3> out;
  for (Role role : {Role::kA, Role::kB, Role::kPronoun}) {
    absl::StatusOr<const MentionEmbedding*> e =
        store_.Find(variant.id, variant.variant_id, role);
    if (!e.ok()) return e.status();
    absl::StatusOr<std::vector<double>> v = ConcatLayers(**e, layers);
    if (!v.ok()) return v.status();
    out[static_cast<int>(role)] = *std::move(v);
  }
  return out;
}

// -------------------------------------------------------------- ModelSpec

ModelSpec ModelSpec::Default(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  spec.name = std::string(ModelKindName(kind));
  if (kind == ModelKind::kEnd2end) {
    spec.layers = {-4};
    spec.hidden = {150};
    spec.seeds = 5;
  } else {
    spec.layers = {-3, -4};
    spec.hidden = {512, 32};
    spec.seeds = 1;
  }
  return spec;
}

nlohmann::json ModelSpec::ToJson() const {
  return {{"name", name},
          {"kind", ModelKindName(kind)},
          {"layers", layers},
          {"hidden", hidden},
          {"activation", activation == Activation::kRelu ? "relu" : "identity"},
          {"seeds", seeds},
          {"linguistic_dim", linguistic_dim},
          {"learning_rate", train.learning_rate},
          {"epochs", train.epochs},
          {"batch_size", train.batch_size}};
}

absl::StatusOr<ModelSpec> ModelSpec::FromJson(const nlohmann::json& j) {
  ModelSpec spec;
  try {
    absl::StatusOr<ModelKind> kind =
        ParseModelKind(j.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    spec.kind = *kind;
    spec.name = j.at("name").get<std::string>();
    spec.layers = j.at("layers").get<std::vector<int>>();
    spec.hidden = j.at("hidden").get<std::vector<int>>();
    spec.activation = j.at("activation").get<std::string>() == "identity"
                          ? Activation::kIdentity
                          : Activation::kRelu;
    spec.seeds = j.at("seeds").get<int>();
    spec.linguistic_dim = j.at("linguistic_dim").get<int>();
    spec.train.learning_rate = j.at("learning_rate").get<double>();
    spec.train.epochs = j.at("epochs").get<int>();
    spec.train.batch_size = j.at("batch_size").get<int>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        str::Cat("malformed model spec: ", e.what()));
  }
  return spec;
}

// ------------------------------------------------------------- training

absl::StatusOr<VariantInputs> BuildInputs(
    std::span<const GapExample> examples,
    std::span<const TtaExpansion> expansions, const EmbeddingSource& source,
    const ModelSpec& spec) {
  if (examples.size() != expansions.size()) {
    return absl::InvalidArgumentError("examples and expansions differ in size");
  }
  const ZeroLinguisticFeatures linguistic(spec.linguistic_dim);
  VariantInputs inputs(examples.size());
  std::vector<std::string> missing;
  size_t missing_count = 0;
  for (size_t i = 0; i < examples.size(); ++i) {
    for (const AugmentedVariant& v : expansions[i].variants) {
      absl::StatusOr<std::array<std::vector<double>, 3>> vectors =
          source.Vectors(v, spec.layers);
      if (!vectors.ok()) {
        if (!absl::IsNotFound(vectors.status())) return vectors.status();
        if (++missing_count <= kMaxListedKeys) {
          missing.push_back(str::Cat(v.id, "/", v.variant_id));
        }
        continue;
      }
      ModelInput in;
      in.a = std::move((*vectors)[0]);
      in.b = std::move((*vectors)[1]);
      in.pronoun = std::move((*vectors)[2]);
      if (spec.kind == ModelKind::kEnd2end) {
        absl::StatusOr<HandFeatures> f =
            ComputeHandFeatures(examples[i], v, linguistic);
        if (!f.ok()) return f.status();
        in.feats_a = f->a.Encode();
        in.feats_b = f->b.Encode();
      }
      inputs[i].push_back(std::move(in));
    }
  }
  if (missing_count > 0) {
    return absl::NotFoundError(
        str::Cat("missing embeddings for ", missing_count,
                 " variants: ", str::Join(missing, ", "),
                 missing_count > kMaxListedKeys ? ", ..." : ""));
  }
  return inputs;
}

namespace {

absl::StatusOr<std::unique_ptr<Classifier>> NewNet(const ModelSpec& spec,
                                                   const ModelInput& sample,
                                                   uint64_t seed) {
  const int d = static_cast<int>(sample.a.size());
  if (spec.kind == ModelKind::kPureBert) {
    return std::make_unique<PureBertNet>(d, spec.hidden, spec.activation, seed);
  }
  return std::make_unique<End2endNet>(d,
                                      static_cast<int>(sample.feats_a.size()),
                                      spec.hidden, spec.activation, seed);
}

}  // namespace

absl::StatusOr<std::vector<PredictionTriple>> PredictWithNets(
    std::span<const Classifier* const> nets, const VariantInputs& inputs,
    bool tta) {
  std::vector<PredictionTriple> out(inputs.size());
  absl::Status status = RunJobs(
      inputs.size(),
      [&](size_t i) -> absl::Status {
        if (inputs[i].empty()) {
          return absl::InvalidArgumentError("example without variants");
        }
        const size_t used = tta ? inputs[i].size() : 1;
        std::vector<PredictionTriple> per_variant;
        per_variant.reserve(used);
        for (size_t v = 0; v < used; ++v) {
          absl::StatusOr<PredictionTriple> p = SeedAverage(nets, inputs[i][v]);
          if (!p.ok()) return p.status();
          per_variant.push_back(*p);
        }
        absl::StatusOr<PredictionTriple> agg = TtaAggregate(per_variant);
        if (!agg.ok()) return agg.status();
        out[i] = *agg;
        return absl::OkStatus();
      },
      /*parallel=*/true);
  if (!status.ok()) return status;
  return out;
}

absl::StatusOr<CvResult> CrossValidate(std::span<const GapExample> examples,
                                       const VariantInputs& inputs,
                                       const ModelSpec& spec,
                                       const CvOptions& options) {
  if (absl::Status s = ValidateTrainConfig(spec.train); !s.ok()) return s;
  if (spec.seeds < 1) return absl::InvalidArgumentError("seeds must be >= 1");
  if (inputs.size() != examples.size()) {
    return absl::InvalidArgumentError("inputs and examples differ in size");
  }
  absl::StatusOr<std::vector<std::vector<size_t>>> folds =
      SplitFolds(examples.size(), options.folds, options.seed);
  if (!folds.ok()) return folds.status();

  CvResult result;
  result.folds = *folds;
  std::vector<int> fold_of(examples.size());
  for (size_t f = 0; f < folds->size(); ++f) {
    for (size_t i : (*folds)[f]) fold_of[i] = static_cast<int>(f);
  }
  const int num_folds = options.folds;
  const size_t num_jobs = static_cast<size_t>(num_folds) * spec.seeds;
  result.nets.resize(num_jobs);

  absl::Status status = RunJobs(
      num_jobs,
      [&](size_t job) -> absl::Status {
        const int fold = static_cast<int>(job) / spec.seeds;
        const int seed_index = static_cast<int>(job) % spec.seeds;
        std::vector<LabeledInput> train;
        for (size_t i = 0; i < examples.size(); ++i) {
          if (fold_of[i] == fold) continue;
          const size_t used = options.augment_train ? inputs[i].size() : 1;
          for (size_t v = 0; v < used; ++v) {
            train.push_back({&inputs[i][v], examples[i].label()});
          }
        }
        if (train.empty()) return absl::InvalidArgumentError("empty fold");
        const uint64_t net_seed = MixSeed(
            options.seed, static_cast<uint64_t>(fold) * 1000003u + seed_index);
        absl::StatusOr<std::unique_ptr<Classifier>> net =
            NewNet(spec, *train.front().input, net_seed);
        if (!net.ok()) return net.status();
        TrainConfig config = spec.train;
        config.seed = MixSeed(net_seed, 0x7452414Eu);
        absl::StatusOr<std::vector<double>> trace = Train(**net, train, config);
        if (!trace.ok()) {
          return absl::Status(trace.status().code(),
                              str::Cat("fold ", fold, " seed ", seed_index,
                                       ": ", trace.status().message()));
        }
        result.nets[job] = {fold, seed_index, *std::move(net),
                            *std::move(trace)};
        return absl::OkStatus();
      },
      options.parallel);
  if (!status.ok()) return status;

  result.oof.assign(examples.size(), PredictionTriple::Uniform());
  for (int fold = 0; fold < num_folds; ++fold) {
    std::vector<const Classifier*> nets;
    for (int s = 0; s < spec.seeds; ++s) {
      nets.push_back(
          result.nets[static_cast<size_t>(fold) * spec.seeds + s].net.get());
    }
    const std::vector<size_t>& held_out = (*folds)[fold];
    VariantInputs held_inputs;
    held_inputs.reserve(held_out.size());
    for (size_t i : held_out) held_inputs.push_back(inputs[i]);
    absl::StatusOr<std::vector<PredictionTriple>> preds =
        PredictWithNets(nets, held_inputs, options.tta);
    if (!preds.ok()) return preds.status();
    for (size_t k = 0; k < held_out.size(); ++k) {
      result.oof[held_out[k]] = (*preds)[k];
    }
  }
  return result;
}

// ------------------------------------------------------------ subcommands

absl::StatusOr<std::vector<GapExample>> LoadCorpus(const CorpusArgs& args,
                                                   bool apply_corrections) {
  if (args.corpus_paths.empty()) {
    return absl::InvalidArgumentError("no corpus files given");
  }
  absl::StatusOr<std::vector<GapExample>> examples =
      ReadGapTsvFiles(args.corpus_paths);
  if (!examples.ok()) return examples.status();
  if (!apply_corrections || args.corrections_path.empty()) return examples;
  absl::StatusOr<std::vector<LabelCorrection>> corrections =
      ReadCorrectionsFile(args.corrections_path);
  if (!corrections.ok()) return corrections.status();
  return ApplyCorrections(*std::move(examples), *corrections);
}

absl::StatusOr<std::unique_ptr<EmbeddingSource>> OpenEmbeddingSource(
    const EmbeddingArgs& args) {
  if (args.embeddings_path.empty()) {
    if (args.stub_dim <= 0) {
      return absl::InvalidArgumentError("stub dimension must be positive");
    }
    return std::make_unique<StubEmbeddingSource>(
        StubEmbedder(args.stub_dim, args.stub_seed));
  }
  absl::StatusOr<EmbeddingStore> store =
      EmbeddingStore::Load(args.embeddings_path);
  if (!store.ok()) return store.status();
  return std::make_unique<StoreEmbeddingSource>(*std::move(store));
}

absl::StatusOr<std::vector<PredictionTriple>> CombinePredictions(
    const std::vector<std::vector<PredictionTriple>>& per_model,
    std::span<const double> weights, ClipThreshold clip) {
  if (per_model.empty()) return absl::InvalidArgumentError("no predictions");
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(per_model.size(), 1.0 / per_model.size());
  if (w.size() != per_model.size()) {
    return absl::InvalidArgumentError(str::Cat(
        per_model.size(), " prediction sets but ", w.size(), " weights"));
  }
  if (absl::Status s = ValidateEnsembleWeights(w); !s.ok()) return s;
  const size_t n = per_model.front().size();
  for (const auto& m : per_model) {
    if (m.size() != n) {
      return absl::InvalidArgumentError("prediction sets differ in length");
    }
  }
  std::vector<PredictionTriple> out(n);
  std::vector<PredictionTriple> row(per_model.size());
  for (size_t i = 0; i < n; ++i) {
    for (size_t m = 0; m < per_model.size(); ++m) row[m] = per_model[m][i];
    absl::StatusOr<PredictionTriple> e = WeightedEnsemble(row, w);
    if (!e.ok()) return e.status();
    out[i] = ClipProbs(*e, clip);
  }
  return out;
}

absl::StatusOr<CoverageReport> RunAugment(const AugmentArgs& args) {
  absl::StatusOr<std::vector<GapExample>> examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/true);
  if (!examples.ok()) return examples.status();
  absl::StatusOr<std::vector<TtaExpansion>> expansions =
      Expand(*examples, args.anonymizer);
  if (!expansions.ok()) return expansions.status();

  CoverageReport coverage;
  std::string variants;
  std::string features;
  if (args.write_features) features = HandFeaturesCsvHeader() + "\n";
  const ZeroLinguisticFeatures linguistic;
  for (size_t i = 0; i < expansions->size(); ++i) {
    const TtaExpansion& x = (*expansions)[i];
    coverage.Add(x);
    for (const AugmentedVariant& v : x.AllRecords()) {
      str::Append(&variants, VariantToJson(v).dump(), "\n");
    }
    if (args.write_features) {
      for (const AugmentedVariant& v : x.variants) {
        absl::StatusOr<HandFeatures> f =
            ComputeHandFeatures((*examples)[i], v, linguistic);
        if (!f.ok()) return f.status();
        str::Append(&features, HandFeaturesCsvRow(v.id, v.variant_id, *f),
                    "\n");
      }
    }
  }
  if (!args.out_dir.empty()) {
    if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
    if (absl::Status s =
            WriteStringToFile(Join(args.out_dir, "variants.jsonl"), variants);
        !s.ok()) {
      return s;
    }
    if (absl::Status s = WriteStringToFile(Join(args.out_dir, "coverage.json"),
                                           coverage.ToJson().dump(2) + "\n");
        !s.ok()) {
      return s;
    }
    if (args.write_features) {
      if (absl::Status s =
              WriteStringToFile(Join(args.out_dir, "features.csv"), features);
          !s.ok()) {
        return s;
      }
    }
  }
  return coverage;
}

absl::Status RunExtractStub(const ExtractStubArgs& args) {
  absl::StatusOr<std::string> contents = ReadFileToString(args.variants_path);
  if (!contents.ok()) return contents.status();
  absl::StatusOr<std::vector<AugmentedVariant>> variants =
      ParseVariantsJsonl(*contents);
  if (!variants.ok()) return variants.status();
  if (args.dim <= 0) {
    return absl::InvalidArgumentError("stub dimension must be positive");
  }
  const StubEmbedder embedder(args.dim, args.seed);
  std::vector<MentionEmbedding> records;
  for (const AugmentedVariant& v : *variants) {
    if (v.variant_id != 0 && !v.applied) continue;
    absl::StatusOr<std::array<MentionEmbedding, 3>> e =
        embedder.Embed(RequestForVariant(v, args.layers));
    if (!e.ok()) return e.status();
    for (MentionEmbedding& m : *e) records.push_back(std::move(m));
  }
  std::string out;
  if (args.binary) {
    out = EncodeEmbeddingsBinary(records);
  } else {
    for (const MentionEmbedding& m : records) {
      str::Append(&out, EmbeddingToJsonLine(m), "\n");
    }
  }
  return WriteStringToFile(args.out_path, out);
}

absl::StatusOr<EvalReport> RunTrain(const TrainArgs& args) {
  absl::StatusOr<std::vector<GapExample>> train_examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/true);
  if (!train_examples.ok()) return train_examples.status();
  // Scores are reported against the labels as distributed.
  absl::StatusOr<std::vector<GapExample>> eval_examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/false);
  if (!eval_examples.ok()) return eval_examples.status();

  absl::StatusOr<std::vector<TtaExpansion>> expansions =
      Expand(*train_examples, args.anonymizer);
  if (!expansions.ok()) return expansions.status();
  absl::StatusOr<std::unique_ptr<EmbeddingSource>> source =
      OpenEmbeddingSource(args.embeddings);
  if (!source.ok()) return source.status();
  absl::StatusOr<VariantInputs> inputs =
      BuildInputs(*train_examples, *expansions, **source, args.spec);
  if (!inputs.ok()) return inputs.status();
  absl::StatusOr<CvResult> cv =
      CrossValidate(*train_examples, *inputs, args.spec, args.cv);
  if (!cv.ok()) return cv.status();

  const std::vector<Label> labels = LabelsOf(*eval_examples);
  const std::vector<std::string> pronouns = PronounsOf(*eval_examples);
  absl::StatusOr<EvalReport> raw = GenderReport(cv->oof, labels, pronouns);
  if (!raw.ok()) return raw.status();
  std::vector<PredictionTriple> clipped;
  clipped.reserve(cv->oof.size());
  for (const PredictionTriple& p : cv->oof) {
    clipped.push_back(ClipProbs(p, args.clip));
  }
  absl::StatusOr<EvalReport> report = GenderReport(clipped, labels, pronouns);
  if (!report.ok()) return report.status();

  if (args.out_dir.empty()) return report;
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  auto write = [&](std::string_view file, std::string_view text) {
    return WriteStringToFile(Join(args.out_dir, file), text);
  };
  if (absl::Status s = write(kSpecFile, args.spec.ToJson().dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  std::string trace = "fold,seed,epoch,loss\n";
  for (const TrainedNet& t : cv->nets) {
    if (absl::Status s = write(NetFileName(t.fold, t.seed_index),
                               t.net->ToJson().dump() + "\n");
        !s.ok()) {
      return s;
    }
    for (size_t e = 0; e < t.loss_trace.size(); ++e) {
      str::Append(&trace, t.fold, ",", t.seed_index, ",", e, ",",
                  fmt::sprintf("%.17g", t.loss_trace[e]), "\n");
    }
  }
  if (absl::Status s = write("loss_trace.csv", trace); !s.ok()) return s;
  if (absl::Status s =
          write("oof.csv", SubmissionCsv(ToRows(*train_examples, cv->oof)));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = write(
          "folds.json", FoldsToJson(cv->folds, *train_examples).dump() + "\n");
      !s.ok()) {
    return s;
  }
  nlohmann::json cv_report{{"raw", raw->ToJson()},
                           {"clipped", report->ToJson()},
                           {"clip_threshold", args.clip.value()},
                           {"folds", args.cv.folds},
                           {"augment_train", args.cv.augment_train},
                           {"tta", args.cv.tta}};
  if (absl::Status s = write("cv_report.json", cv_report.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  return report;
}

absl::Status RunPredict(const PredictArgs& args) {
  absl::StatusOr<std::vector<GapExample>> examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/false);
  if (!examples.ok()) return examples.status();
  absl::StatusOr<std::vector<TtaExpansion>> expansions =
      Expand(*examples, args.anonymizer);
  if (!expansions.ok()) return expansions.status();
  absl::StatusOr<std::unique_ptr<EmbeddingSource>> source =
      OpenEmbeddingSource(args.embeddings);
  if (!source.ok()) return source.status();
  if (args.model_dirs.empty()) {
    return absl::InvalidArgumentError("no model directories given");
  }

  std::vector<std::vector<PredictionTriple>> per_model;
  for (const std::string& dir : args.model_dirs) {
    absl::StatusOr<nlohmann::json> spec_json =
        ReadJsonFile(Join(dir, kSpecFile));
    if (!spec_json.ok()) return spec_json.status();
    absl::StatusOr<ModelSpec> spec = ModelSpec::FromJson(*spec_json);
    if (!spec.ok()) return spec.status();

    std::vector<std::string> files;
    std::error_code ec;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("model_") && name.ends_with(".json")) {
        files.push_back(entry.path().string());
      }
    }
    if (ec) {
      return absl::NotFoundError(str::Cat("cannot list ", dir));
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      return absl::NotFoundError(str::Cat("no checkpoints in ", dir));
    }
    std::vector<std::unique_ptr<Classifier>> nets;
    for (const std::string& file : files) {
      absl::StatusOr<nlohmann::json> j = ReadJsonFile(file);
      if (!j.ok()) return j.status();
      absl::StatusOr<std::unique_ptr<Classifier>> net = ClassifierFromJson(*j);
      if (!net.ok()) {
        return absl::InvalidArgumentError(
            str::Cat(file, ": ", net.status().message()));
      }
      nets.push_back(*std::move(net));
    }
    std::vector<const Classifier*> views;
    for (const auto& n : nets) views.push_back(n.get());

    absl::StatusOr<VariantInputs> inputs =
        BuildInputs(*examples, *expansions, **source, *spec);
    if (!inputs.ok()) return inputs.status();
    absl::StatusOr<std::vector<PredictionTriple>> preds =
        PredictWithNets(views, *inputs, args.tta);
    if (!preds.ok()) return preds.status();
    per_model.push_back(*std::move(preds));
  }
  absl::StatusOr<std::vector<PredictionTriple>> combined =
      CombinePredictions(per_model, args.weights, args.clip);
  if (!combined.ok()) return combined.status();
  return WriteStringToFile(args.out_path,
                           SubmissionCsv(ToRows(*examples, *combined)));
}

absl::StatusOr<EvalReport> RunEvaluate(const EvaluateArgs& args) {
  absl::StatusOr<std::vector<GapExample>> examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/true);
  if (!examples.ok()) return examples.status();
  std::vector<std::vector<PredictionTriple>> per_model;
  for (const std::string& path : args.prediction_paths) {
    absl::StatusOr<std::vector<PredictionTriple>> p =
        AlignSubmission(path, *examples);
    if (!p.ok()) return p.status();
    per_model.push_back(*std::move(p));
  }
  absl::StatusOr<std::vector<PredictionTriple>> combined =
      CombinePredictions(per_model, args.weights, args.clip);
  if (!combined.ok()) return combined.status();
  absl::StatusOr<EvalReport> report =
      GenderReport(*combined, LabelsOf(*examples), PronounsOf(*examples));
  if (!report.ok()) return report.status();
  if (!args.out_path.empty()) {
    if (absl::Status s =
            WriteStringToFile(args.out_path, report->ToJson().dump(2) + "\n");
        !s.ok()) {
      return s;
    }
  }
  return report;
}

absl::StatusOr<BootstrapSummary> RunBootstrap(const BootstrapArgs& args) {
  absl::StatusOr<std::vector<GapExample>> examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/true);
  if (!examples.ok()) return examples.status();
  absl::StatusOr<std::vector<PredictionTriple>> preds =
      AlignSubmission(args.predictions_path, *examples);
  if (!preds.ok()) return preds.status();
  for (PredictionTriple& p : *preds) p = ClipProbs(p, args.clip);
  absl::StatusOr<BootstrapSummary> summary =
      BootstrapScore(*preds, LabelsOf(*examples), args.options);
  if (!summary.ok()) return summary.status();
  if (!args.out_path.empty()) {
    if (absl::Status s =
            WriteStringToFile(args.out_path, summary->ToJson().dump(2) + "\n");
        !s.ok()) {
      return s;
    }
  }
  return summary;
}

absl::Status RunReportLengths(const ReportLengthsArgs& args) {
  absl::StatusOr<std::vector<GapExample>> examples =
      LoadCorpus(args.corpus, /*apply_corrections=*/false);
  if (!examples.ok()) return examples.status();
  absl::StatusOr<std::vector<HistogramBin>> bins =
      LengthHistogram(*examples, args.bin_width);
  if (!bins.ok()) return bins.status();
  const std::string csv = HistogramCsv(*bins);
  if (args.out_path.empty()) {
    std::cout << csv;
    return absl::OkStatus();
  }
  return WriteStringToFile(args.out_path, csv);
}

}  // namespace gapanon
