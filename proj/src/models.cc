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

#include "gapanon/models.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "gapanon/strings.h"

namespace gapanon {
namespace {

constexpr int kCheckpointVersion = 1;

std::string_view ActivationName(Activation act) {
  return act == Activation::kRelu ? "relu" : "identity";
}

absl::StatusOr<Activation> ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  return absl::InvalidArgumentError(
      str::Cat("unknown activation '", name, "'"));
}

// -log softmax(logits)[label] and d/dlogits.
double CrossEntropy(const std::array<double, 3>& logits, Label label,
                    std::array<double, 3>* dlogits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double e2 = std::exp(logits[2] - m);
  const double sum = (e0 + e1) + e2;
  const int y = static_cast<int>(label);
  (*dlogits)[0] = e0 / sum;
  (*dlogits)[1] = e1 / sum;
  (*dlogits)[2] = e2 / sum;
  (*dlogits)[y] -= 1.0;
  return -(logits[y] - m - std::log(sum));
}

absl::Status CheckDim(std::string_view what, size_t got, size_t want) {
  if (got == want) return absl::OkStatus();
  return absl::InvalidArgumentError(
      str::Cat(what, " has dimension ", got, ", expected ", want));
}

std::vector<int> WithEnds(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

nlohmann::json MlpJson(const Mlp& mlp) {
  return {{"sizes", mlp.sizes()},
          {"activation", ActivationName(mlp.hidden_activation())},
          {"params",
           std::vector<double>(mlp.params().begin(), mlp.params().end())}};
}

absl::Status LoadParams(const nlohmann::json& j, Mlp* mlp) {
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != mlp->params().size()) {
    return absl::InvalidArgumentError(str::Cat("checkpoint has ", params.size(),
                                               " parameters, shapes need ",
                                               mlp->params().size()));
  }
  for (const double p : params) {
    if (!std::isfinite(p)) {
      return absl::InvalidArgumentError("checkpoint has non-finite parameter");
    }
  }
  std::copy(params.begin(), params.end(), mlp->params().begin());
  return absl::OkStatus();
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kEnd2end ? "end2end" : "pure_bert";
}

absl::StatusOr<ModelKind> ParseModelKind(std::string_view name) {
  if (name == "end2end") return ModelKind::kEnd2end;
  if (name == "pure_bert") return ModelKind::kPureBert;
  return absl::InvalidArgumentError(
      str::Cat("unknown model kind '", name, "'"));
}

std::array<double, 3> Softmax(const std::array<double, 3>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double e2 = std::exp(logits[2] - m);
  const double sum = (e0 + e1) + e2;
  return {e0 / sum, e1 / sum, e2 / sum};
}

// ---------------------------------------------------------------- PureBert

PureBertNet::PureBertNet(int embedding_dim, std::vector<int> hidden,
                         Activation act, uint64_t seed)
    : embedding_dim_(embedding_dim),
      mlp_(WithEnds(3 * embedding_dim, hidden, 3), act) {
  Rng rng(seed);
  mlp_.InitGlorot(rng);
}

std::unique_ptr<Classifier> PureBertNet::Clone() const {
  return std::make_unique<PureBertNet>(*this);
}

absl::StatusOr<PredictionTriple> PureBertNet::Forward(
    std::span<const double> x) const {
  if (absl::Status s = CheckDim("input", x.size(), 3 * embedding_dim_);
      !s.ok()) {
    return s;
  }
  const std::vector<double> z = mlp_.Forward(x);
  return PredictionTriple{Softmax({z[0], z[1], z[2]})};
}

absl::Status PureBertNet::CheckInput(const ModelInput& in) const {
  const size_t d = static_cast<size_t>(embedding_dim_);
  if (absl::Status s = CheckDim("A embedding", in.a.size(), d); !s.ok())
    return s;
  if (absl::Status s = CheckDim("B embedding", in.b.size(), d); !s.ok())
    return s;
  return CheckDim("pronoun embedding", in.pronoun.size(), d);
}

namespace {
std::vector<double> Concat3(const ModelInput& in) {
  std::vector<double> x;
  x.reserve(in.a.size() + in.b.size() + in.pronoun.size());
  x.insert(x.end(), in.a.begin(), in.a.end());
  x.insert(x.end(), in.b.begin(), in.b.end());
  x.insert(x.end(), in.pronoun.begin(), in.pronoun.end());
  return x;
}
}  // namespace

absl::StatusOr<PredictionTriple> PureBertNet::Predict(
    const ModelInput& input) const {
  if (absl::Status s = CheckInput(input); !s.ok()) return s;
  return Forward(Concat3(input));
}

double PureBertNet::LossAndGradient(const ModelInput& input, Label label,
                                    std::span<double> grad) const {
  Mlp::Tape tape;
  const std::vector<double> z = mlp_.Forward(Concat3(input), &tape);
  std::array<double, 3> dz;
  const double loss = CrossEntropy({z[0], z[1], z[2]}, label, &dz);
  mlp_.Backward(tape, dz, grad);
  return loss;
}

nlohmann::json PureBertNet::ToJson() const {
  nlohmann::json j = MlpJson(mlp_);
  j["format"] = "gapanon-model";
  j["version"] = kCheckpointVersion;
  j["kind"] = ModelKindName(kind());
  j["embedding_dim"] = embedding_dim_;
  return j;
}

// ----------------------------------------------------------------- End2end

End2endNet::End2endNet(int embedding_dim, int feature_dim,
                       std::vector<int> hidden, Activation act, uint64_t seed)
    : embedding_dim_(embedding_dim),
      feature_dim_(feature_dim),
      scorer_(WithEnds(3 * embedding_dim + feature_dim, hidden, 1), act) {
  Rng rng(seed);
  scorer_.InitGlorot(rng);
}

std::unique_ptr<Classifier> End2endNet::Clone() const {
  return std::make_unique<End2endNet>(*this);
}

std::vector<double> End2endNet::PairInput(
    std::span<const double> name, std::span<const double> pronoun,
    std::span<const double> features) const {
  std::vector<double> x;
  x.reserve(3 * name.size() + features.size());
  x.insert(x.end(), name.begin(), name.end());
  x.insert(x.end(), pronoun.begin(), pronoun.end());
  for (size_t i = 0; i < name.size(); ++i) x.push_back(name[i] * pronoun[i]);
  x.insert(x.end(), features.begin(), features.end());
  return x;
}

absl::Status End2endNet::CheckInput(const ModelInput& in) const {
  const size_t d = static_cast<size_t>(embedding_dim_);
  const size_t f = static_cast<size_t>(feature_dim_);
  if (absl::Status s = CheckDim("A embedding", in.a.size(), d); !s.ok())
    return s;
  if (absl::Status s = CheckDim("B embedding", in.b.size(), d); !s.ok())
    return s;
  if (absl::Status s = CheckDim("pronoun embedding", in.pronoun.size(), d);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckDim("A features", in.feats_a.size(), f); !s.ok()) {
    return s;
  }
  return CheckDim("B features", in.feats_b.size(), f);
}

absl::StatusOr<PredictionTriple> End2endNet::Forward(
    std::span<const double> a, std::span<const double> b,
    std::span<const double> p, std::span<const double> feats_a,
    std::span<const double> feats_b) const {
  ModelInput in;
  in.a.assign(a.begin(), a.end());
  in.b.assign(b.begin(), b.end());
  in.pronoun.assign(p.begin(), p.end());
  in.feats_a.assign(feats_a.begin(), feats_a.end());
  in.feats_b.assign(feats_b.begin(), feats_b.end());
  return Predict(in);
}

absl::StatusOr<PredictionTriple> End2endNet::Predict(
    const ModelInput& in) const {
  if (absl::Status s = CheckInput(in); !s.ok()) return s;
  const double score_a =
      scorer_.Forward(PairInput(in.a, in.pronoun, in.feats_a))[0];
  const double score_b =
      scorer_.Forward(PairInput(in.b, in.pronoun, in.feats_b))[0];
  return PredictionTriple{Softmax({score_a, score_b, 0.0})};
}

double End2endNet::LossAndGradient(const ModelInput& in, Label label,
                                   std::span<double> grad) const {
  Mlp::Tape tape_a;
  Mlp::Tape tape_b;
  const double score_a =
      scorer_.Forward(PairInput(in.a, in.pronoun, in.feats_a), &tape_a)[0];
  const double score_b =
      scorer_.Forward(PairInput(in.b, in.pronoun, in.feats_b), &tape_b)[0];
  std::array<double, 3> dz;
  const double loss = CrossEntropy({score_a, score_b, 0.0}, label, &dz);
  const double da[1] = {dz[0]};
  const double db[1] = {dz[1]};
  scorer_.Backward(tape_a, da, grad);
  scorer_.Backward(tape_b, db, grad);
  return loss;
}

nlohmann::json End2endNet::ToJson() const {
  nlohmann::json j = MlpJson(scorer_);
  j["format"] = "gapanon-model";
  j["version"] = kCheckpointVersion;
  j["kind"] = ModelKindName(kind());
  j["embedding_dim"] = embedding_dim_;
  j["feature_dim"] = feature_dim_;
  return j;
}

// ------------------------------------------------------------------ shared

absl::StatusOr<std::unique_ptr<Classifier>> ClassifierFromJson(
    const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gapanon-model") {
      return absl::InvalidArgumentError("not a gapanon model checkpoint");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      return absl::InvalidArgumentError(str::Cat(
          "unsupported checkpoint version ", j.at("version").get<int>()));
    }
    absl::StatusOr<ModelKind> kind =
        ParseModelKind(j.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    absl::StatusOr<Activation> act =
        ParseActivation(j.at("activation").get<std::string>());
    if (!act.ok()) return act.status();
    const auto sizes = j.at("sizes").get<std::vector<int>>();
    if (sizes.size() < 2) {
      return absl::InvalidArgumentError("checkpoint needs at least 2 sizes");
    }
    const std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
    const int embedding_dim = j.at("embedding_dim").get<int>();
    if (*kind == ModelKind::kPureBert) {
      if (sizes.front() != 3 * embedding_dim || sizes.back() != 3) {
        return absl::InvalidArgumentError("pure_bert shapes are inconsistent");
      }
      auto net = std::make_unique<PureBertNet>(embedding_dim, hidden, *act, 0);
      if (absl::Status s = LoadParams(j, &net->mlp_); !s.ok()) return s;
      return net;
    }
    const int feature_dim = j.at("feature_dim").get<int>();
    if (sizes.front() != 3 * embedding_dim + feature_dim || sizes.back() != 1) {
      return absl::InvalidArgumentError("end2end shapes are inconsistent");
    }
    auto net = std::make_unique<End2endNet>(embedding_dim, feature_dim, hidden,
                                            *act, 0);
    if (absl::Status s = LoadParams(j, &net->scorer_); !s.ok()) return s;
    return net;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        str::Cat("malformed checkpoint: ", e.what()));
  }
}

double GradientCheck(const Classifier& net, const ModelInput& input,
                     Label label, double step) {
  std::vector<double> analytic(net.params().size(), 0.0);
  net.LossAndGradient(input, label, analytic);

  std::unique_ptr<Classifier> probe = net.Clone();
  std::vector<double> scratch(net.params().size(), 0.0);
  auto loss_at = [&](size_t i, double value) {
    const double saved = probe->params()[i];
    probe->params()[i] = value;
    const double loss = probe->LossAndGradient(input, label, scratch);
    probe->params()[i] = saved;
    return loss;
  };
  double worst = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    const double theta = net.params()[i];
    const double numeric =
        (loss_at(i, theta + step) - loss_at(i, theta - step)) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

absl::StatusOr<PredictionTriple> SeedAverage(
    std::span<const Classifier* const> nets, const ModelInput& input) {
  if (nets.empty()) {
    return absl::InvalidArgumentError("seed average needs at least one net");
  }
  PredictionTriple mean{{0.0, 0.0, 0.0}};
  for (const Classifier* net : nets) {
    absl::StatusOr<PredictionTriple> p = net->Predict(input);
    if (!p.ok()) return p.status();
    for (int c = 0; c < 3; ++c) mean.p[c] += p->p[c];
  }
  for (double& x : mean.p) x /= static_cast<double>(nets.size());
  return mean;
}

}  // namespace gapanon
