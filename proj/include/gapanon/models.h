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

#ifndef GAPANON_MODELS_H_
#define GAPANON_MODELS_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gapanon/corpus.h"
#include "gapanon/mlp.h"
#include "gapanon/prediction.h"
#include "nlohmann/json.hpp"

namespace gapanon {

// Everything either head can consume for one (example, variant). The pure
// head ignores the hand features.
struct ModelInput {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> pronoun;
  std::vector<double> feats_a;
  std::vector<double> feats_b;
};

// Non-owning view of one training sample; `input` must outlive its use.
struct LabeledInput {
  const ModelInput* input = nullptr;
  Label label = Label::kNeither;
};

enum class ModelKind { kEnd2end, kPureBert };

std::string_view ModelKindName(ModelKind kind);  // "end2end", "pure_bert"
absl::StatusOr<ModelKind> ParseModelKind(std::string_view name);

std::array<double, 3> Softmax(const std::array<double, 3>& logits);

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ModelKind kind() const = 0;
  virtual std::unique_ptr<Classifier> Clone() const = 0;

  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;

  virtual absl::StatusOr<PredictionTriple> Predict(
      const ModelInput& input) const = 0;

  // Cross-entropy of the prediction against `label`; adds its gradient into
  // `grad`, which has params().size() entries. Input dims must be valid.
  virtual double LossAndGradient(const ModelInput& input, Label label,
                                 std::span<double> grad) const = 0;

  virtual absl::Status CheckInput(const ModelInput& input) const = 0;

  virtual nlohmann::json ToJson() const = 0;
};

// [A; B; P] -> hidden ReLU layers (512, 32 by default) -> 3-way softmax.
class PureBertNet : public Classifier {
 public:
  PureBertNet(int embedding_dim, std::vector<int> hidden, Activation act,
              uint64_t seed);

  int embedding_dim() const { return embedding_dim_; }
  const Mlp& mlp() const { return mlp_; }

  // x is the concatenated [A; B; P] vector.
  absl::StatusOr<PredictionTriple> Forward(std::span<const double> x) const;

  ModelKind kind() const override { return ModelKind::kPureBert; }
  std::unique_ptr<Classifier> Clone() const override;
  std::span<double> params() override { return mlp_.params(); }
  std::span<const double> params() const override { return mlp_.params(); }
  absl::StatusOr<PredictionTriple> Predict(
      const ModelInput& input) const override;
  double LossAndGradient(const ModelInput& input, Label label,
                         std::span<double> grad) const override;
  absl::Status CheckInput(const ModelInput& input) const override;
  nlohmann::json ToJson() const override;

 private:
  friend absl::StatusOr<std::unique_ptr<Classifier>> ClassifierFromJson(
      const nlohmann::json& j);

  int embedding_dim_;
  Mlp mlp_;
};

// Antecedent scoring: a shared scorer maps
// [name; pronoun; name * pronoun; pair features] to one score, applied to A
// and to B. Neither has the fixed score 0.
class End2endNet : public Classifier {
 public:
  End2endNet(int embedding_dim, int feature_dim, std::vector<int> hidden,
             Activation act, uint64_t seed);

  int embedding_dim() const { return embedding_dim_; }
  int feature_dim() const { return feature_dim_; }
  const Mlp& scorer() const { return scorer_; }

  // Scorer input for one candidate.
  std::vector<double> PairInput(std::span<const double> name,
                                std::span<const double> pronoun,
                                std::span<const double> features) const;

  absl::StatusOr<PredictionTriple> Forward(
      std::span<const double> a, std::span<const double> b,
      std::span<const double> p, std::span<const double> feats_a,
      std::span<const double> feats_b) const;

  ModelKind kind() const override { return ModelKind::kEnd2end; }
  std::unique_ptr<Classifier> Clone() const override;
  std::span<double> params() override { return scorer_.params(); }
  std::span<const double> params() const override { return scorer_.params(); }
  absl::StatusOr<PredictionTriple> Predict(
      const ModelInput& input) const override;
  double LossAndGradient(const ModelInput& input, Label label,
                         std::span<double> grad) const override;
  absl::Status CheckInput(const ModelInput& input) const override;
  nlohmann::json ToJson() const override;

 private:
  friend absl::StatusOr<std::unique_ptr<Classifier>> ClassifierFromJson(
      const nlohmann::json& j);

  int embedding_dim_;
  int feature_dim_;
  Mlp scorer_;
};

// Checkpoint format: {"format": "gapanon-model", "version": 1, "kind": ...,
// "embedding_dim", "feature_dim" (end2end), "sizes", "activation",
// "params"}.
absl::StatusOr<std::unique_ptr<Classifier>> ClassifierFromJson(
    const nlohmann::json& j);

// Central finite differences of the loss against the analytic gradient.
// Returns max over parameters of |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-6).
double GradientCheck(const Classifier& net, const ModelInput& input,
                     Label label, double step = 1e-4);

// Mean of the nets' probability outputs.
absl::StatusOr<PredictionTriple> SeedAverage(
    std::span<const Classifier* const> nets, const ModelInput& input);

}  // namespace gapanon

#endif  // GAPANON_MODELS_H_
