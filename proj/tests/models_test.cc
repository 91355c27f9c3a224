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

#include <cmath>

#include "gapanon/random.h"
#include "gtest/gtest.h"
#include "testing/oracles.h"

namespace gapanon {
namespace {

using testing::RandomInput;

constexpr double kOracleTolerance = 1e-10;

TEST(ModelsTest, ZeroWeightsGiveUniform) {
  PureBertNet net(4, {8, 4}, Activation::kRelu, 1);
  for (double& p : net.params()) p = 0.0;
  Rng rng(1);
  const PredictionTriple p = *net.Predict(RandomInput(rng, 4, 0));
  for (double x : p.p) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(ModelsTest, PureBertMatchesStraightLineOracle) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const PureBertNet net(8, {16, 8}, Activation::kRelu, 100 + trial);
    const ModelInput in = RandomInput(rng, 8, 0);
    const PredictionTriple p = *net.Predict(in);
    const std::array<double, 3> q = testing::OraclePureBert(net, in);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(p.p[c], q[c], kOracleTolerance);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
  }
}

TEST(ModelsTest, End2endMatchesOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const End2endNet net(6, 5, {16}, Activation::kRelu, 200 + trial);
    const ModelInput in = RandomInput(rng, 6, 5);
    const PredictionTriple p = *net.Predict(in);
    const std::array<double, 3> q = testing::OracleEnd2end(net, in);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(p.p[c], q[c], kOracleTolerance);
  }
}

TEST(ModelsTest, End2endPairInputHasHadamardTerm) {
  const End2endNet net(3, 2, {4}, Activation::kRelu, 1);
  const std::vector<double> v = {1.5, -2.0, 0.5};
  const std::vector<double> f = {1.0, 0.0};
  const std::vector<double> x = net.PairInput(v, v, f);
  ASSERT_EQ(x.size(), 11u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x[6 + i], v[i] * v[i]);
  EXPECT_EQ(x[9], 1.0);
}

TEST(ModelsTest, End2endSwapSymmetryIsExact) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const End2endNet net(5, 3, {16}, Activation::kRelu, trial);
    const ModelInput in = RandomInput(rng, 5, 3);
    ModelInput swapped = in;
    std::swap(swapped.a, swapped.b);
    std::swap(swapped.feats_a, swapped.feats_b);
    const PredictionTriple p = *net.Predict(in);
    const PredictionTriple q = *net.Predict(swapped);
    EXPECT_EQ(p.a(), q.b());
    EXPECT_EQ(p.b(), q.a());
    EXPECT_EQ(p.neither(), q.neither());
    ModelInput same = in;
    same.b = same.a;
    same.feats_b = same.feats_a;
    const PredictionTriple s = *net.Predict(same);
    EXPECT_EQ(s.a(), s.b());
  }
}

TEST(ModelsTest, DimensionMismatchIsRejected) {
  const PureBertNet pure(4, {8}, Activation::kRelu, 1);
  const End2endNet e2e(4, 2, {8}, Activation::kRelu, 1);
  Rng rng(2);
  ModelInput in = RandomInput(rng, 5, 2);
  EXPECT_FALSE(pure.Predict(in).ok());
  EXPECT_FALSE(e2e.Predict(in).ok());
  in = RandomInput(rng, 4, 3);
  EXPECT_TRUE(pure.Predict(in).ok());
  EXPECT_FALSE(e2e.Predict(in).ok());
  const std::vector<double> x(11, 0.0);
  EXPECT_FALSE(pure.Forward(x).ok());
}

TEST(ModelsTest, GradientCheckLinearNetsIsTight) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const PureBertNet pure(4, {6}, Activation::kIdentity, trial);
    const End2endNet e2e(4, 3, {6}, Activation::kIdentity, trial);
    const Label label = static_cast<Label>(trial % 3);
    EXPECT_LT(GradientCheck(pure, RandomInput(rng, 4, 0), label), 1e-6);
    EXPECT_LT(GradientCheck(e2e, RandomInput(rng, 4, 3), label), 1e-6);
  }
}

TEST(ModelsTest, GradientCheckAgreesWithIndependentDifferences) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const PureBertNet pure(4, {16, 8}, Activation::kRelu, 50 + trial);
    const End2endNet e2e(4, 3, {16}, Activation::kRelu, 50 + trial);
    const Label label = static_cast<Label>(trial % 3);
    const ModelInput pin = RandomInput(rng, 4, 0);
    const ModelInput ein = RandomInput(rng, 4, 3);
    EXPECT_LT(GradientCheck(pure, pin, label), 1e-4);
    EXPECT_LT(testing::FiniteDifferenceCheck(pure, pin, label, 1e-4), 1e-4);
    EXPECT_LT(GradientCheck(e2e, ein, label), 1e-4);
    EXPECT_LT(testing::FiniteDifferenceCheck(e2e, ein, label, 1e-4), 1e-4);
  }
}

TEST(ModelsTest, CheckpointRoundTrip) {
  const PureBertNet pure(4, {8, 4}, Activation::kRelu, 7);
  const End2endNet e2e(4, 3, {8}, Activation::kIdentity, 7);
  Rng rng(5);
  const ModelInput in = RandomInput(rng, 4, 3);
  for (const Classifier* net : {static_cast<const Classifier*>(&pure),
                                static_cast<const Classifier*>(&e2e)}) {
    const nlohmann::json j = nlohmann::json::parse(net->ToJson().dump());
    absl::StatusOr<std::unique_ptr<Classifier>> back = ClassifierFromJson(j);
    ASSERT_TRUE(back.ok()) << back.status();
    EXPECT_EQ((*back)->kind(), net->kind());
    EXPECT_EQ(*(*back)->Predict(in), *net->Predict(in));
  }
  nlohmann::json bad = pure.ToJson();
  bad["params"].erase(0);
  EXPECT_FALSE(ClassifierFromJson(bad).ok());
  bad = pure.ToJson();
  bad["format"] = "other";
  EXPECT_FALSE(ClassifierFromJson(bad).ok());
}

TEST(ModelsTest, SeedAverage) {
  Rng rng(6);
  const ModelInput in = RandomInput(rng, 4, 0);
  std::vector<PureBertNet> nets;
  for (int s = 0; s < 5; ++s)
    nets.emplace_back(4, std::vector<int>{8}, Activation::kRelu, s);
  std::vector<const Classifier*> views;
  std::array<double, 3> expected{};
  for (const PureBertNet& n : nets) {
    views.push_back(&n);
    const PredictionTriple p = *n.Predict(in);
    for (int c = 0; c < 3; ++c) expected[c] += p.p[c] / 5.0;
  }
  const PredictionTriple avg = *SeedAverage(views, in);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(avg.p[c], expected[c], 1e-15);
  const std::vector<const Classifier*> one = {views[0]};
  EXPECT_EQ(*SeedAverage(one, in), *views[0]->Predict(in));
  EXPECT_FALSE(SeedAverage({}, in).ok());
}

TEST(ModelsTest, SoftmaxIsStableForLargeLogits) {
  const std::array<double, 3> p = Softmax({1000.0, 1000.0, -1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(ModelsTest, KindNames) {
  EXPECT_EQ(*ParseModelKind("end2end"), ModelKind::kEnd2end);
  EXPECT_EQ(*ParseModelKind(ModelKindName(ModelKind::kPureBert)),
            ModelKind::kPureBert);
  EXPECT_FALSE(ParseModelKind("bert").ok());
}

}  // namespace
}  // namespace gapanon
