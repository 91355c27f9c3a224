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

#include "gapanon/ensemble_eval.h"

#include <cmath>
#include <numbers>

#include "gapanon/parallel.h"
#include "gapanon/random.h"
#include "gtest/gtest.h"
#include "testing/oracles.h"

namespace gapanon {
namespace {

PredictionTriple P(double a, double b, double n) { return {{a, b, n}}; }

std::vector<PredictionTriple> RandomPreds(Rng& rng, size_t n) {
  std::vector<PredictionTriple> out;
  for (size_t i = 0; i < n; ++i) {
    PredictionTriple p;
    double s = 0.0;
    for (double& x : p.p) s += (x = rng.Uniform(0.001, 1.0));
    for (double& x : p.p) x /= s;
    out.push_back(p);
  }
  return out;
}

std::vector<Label> RandomLabels(Rng& rng, size_t n) {
  std::vector<Label> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back(static_cast<Label>(rng.UniformIndex(3)));
  }
  return out;
}

TEST(EnsembleEvalTest, UniformLogLossIsLn3) {
  const std::vector<PredictionTriple> preds(7, PredictionTriple::Uniform());
  const std::vector<Label> labels = {Label::kA,      Label::kB, Label::kNeither,
                                     Label::kA,      Label::kA, Label::kB,
                                     Label::kNeither};
  const LogLossResult r = *LogLoss(preds, labels);
  EXPECT_NEAR(r.mean, std::log(3.0), 1e-9);
  EXPECT_EQ(r.infinite_rows, 0u);
}

TEST(EnsembleEvalTest, LogLossMatchesOracleWithRenormalization) {
  Rng rng(1);
  std::vector<PredictionTriple> preds = RandomPreds(rng, 50);
  for (PredictionTriple& p : preds) p.p[0] *= 1.7;  // rows no longer sum to 1
  const std::vector<Label> labels = RandomLabels(rng, 50);
  std::vector<std::array<double, 3>> raw;
  for (const PredictionTriple& p : preds) raw.push_back(p.p);
  EXPECT_NEAR(LogLoss(preds, labels)->mean, testing::OracleLogLoss(raw, labels),
              1e-12);
}

TEST(EnsembleEvalTest, ZeroTrueProbabilityIsCountedAsInfinite) {
  const std::vector<PredictionTriple> preds = {P(1, 0, 0), P(0.5, 0.5, 0)};
  const std::vector<Label> labels = {Label::kB, Label::kA};
  const LogLossResult r = *LogLoss(preds, labels);
  EXPECT_TRUE(std::isinf(r.mean));
  EXPECT_EQ(r.infinite_rows, 1u);
  EXPECT_FALSE(LogLoss(preds, std::vector<Label>{Label::kA}).ok());
}

TEST(EnsembleEvalTest, ClipExample) {
  const PredictionTriple c =
      ClipProbs(P(0.999, 0.0005, 0.0005), ClipThreshold::Default());
  EXPECT_EQ(c, P(0.999, 0.005, 0.005));
}

TEST(EnsembleEvalTest, ClipIsIdempotentAndMonotone) {
  Rng rng(2);
  const ClipThreshold t = *ClipThreshold::Create(0.02);
  for (const PredictionTriple& p : RandomPreds(rng, 200)) {
    const PredictionTriple c = ClipProbs(p, t);
    EXPECT_EQ(ClipProbs(c, t), c);
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(c.p[k], p.p[k]);
      EXPECT_GE(c.p[k], 0.02);
    }
  }
  EXPECT_FALSE(ClipThreshold::Create(-0.1).ok());
  EXPECT_FALSE(ClipThreshold::Create(1.0 / 3.0).ok());
  EXPECT_TRUE(ClipThreshold::Create(0.0).ok());
}

TEST(EnsembleEvalTest, ClippingLowersLossWithConfidentMistake) {
  Rng rng(3);
  std::vector<PredictionTriple> preds = RandomPreds(rng, 30);
  std::vector<Label> labels = RandomLabels(rng, 30);
  preds[0] = P(0.998, 0.001, 0.001);
  labels[0] = Label::kB;
  std::vector<PredictionTriple> clipped;
  for (const PredictionTriple& p : preds) {
    clipped.push_back(ClipProbs(p, ClipThreshold::Default()));
  }
  EXPECT_LT(LogLoss(clipped, labels)->mean, LogLoss(preds, labels)->mean);
}

TEST(EnsembleEvalTest, BiasReproducesPublishedRow) {
  // Feminine rows score 0.3021 and masculine rows 0.2823 by construction.
  std::vector<PredictionTriple> preds;
  std::vector<Label> labels;
  std::vector<std::string> pronouns;
  for (int i = 0; i < 10; ++i) {
    const bool feminine = i % 2 == 0;
    const double p = std::exp(-(feminine ? 0.3021 : 0.2823));
    preds.push_back(P(p, (1 - p) / 2, (1 - p) / 2));
    labels.push_back(Label::kA);
    pronouns.push_back(feminine ? "her" : "his");
  }
  const EvalReport r = *GenderReport(preds, labels, pronouns);
  EXPECT_NEAR(*r.feminine, 0.3021, 1e-12);
  EXPECT_NEAR(*r.masculine, 0.2823, 1e-12);
  EXPECT_EQ(std::round(*r.bias * 100.0) / 100.0, 0.93);
  EXPECT_NEAR(r.overall, (0.3021 + 0.2823) / 2, 1e-12);
  EXPECT_EQ(r.feminine_count, 5u);
  EXPECT_EQ(r.masculine_count, 5u);
}

TEST(EnsembleEvalTest, ReportWithoutOneGenderHasNoBias) {
  const std::vector<PredictionTriple> preds(2, PredictionTriple::Uniform());
  const std::vector<Label> labels(2, Label::kA);
  const std::vector<std::string> pronouns = {"she", "her"};
  const EvalReport r = *GenderReport(preds, labels, pronouns);
  EXPECT_FALSE(r.masculine.has_value());
  EXPECT_FALSE(r.bias.has_value());
  EXPECT_TRUE(r.ToJson()["bias"].is_null());
}

TEST(EnsembleEvalTest, TtaAggregateIsRenormalizedMean) {
  const std::vector<PredictionTriple> v = {P(0.6, 0.3, 0.1), P(0.2, 0.2, 0.6),
                                           P(0.1, 0.8, 0.1)};
  const PredictionTriple m = *TtaAggregate(v);
  EXPECT_NEAR(m.a(), 0.3, 1e-15);
  EXPECT_NEAR(m.b(), 13.0 / 30.0, 1e-15);
  EXPECT_NEAR(m.neither(), 0.8 / 3.0, 1e-15);
  const std::vector<PredictionTriple> one = {P(0.6, 0.3, 0.1)};
  const PredictionTriple same = *TtaAggregate(one);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(same.p[c], one[0].p[c], 1e-15);
  EXPECT_FALSE(TtaAggregate({}).ok());
}

TEST(EnsembleEvalTest, WeightedEnsemble) {
  const std::vector<PredictionTriple> m = {P(0.6, 0.3, 0.1), P(0.2, 0.2, 0.6)};
  const std::vector<double> w = {0.25, 0.75};
  const PredictionTriple e = *WeightedEnsemble(m, w);
  EXPECT_NEAR(e.a(), 0.3, 1e-15);
  EXPECT_NEAR(e.neither(), 0.475, 1e-15);
  const std::vector<double> single = {1.0, 0.0};
  EXPECT_EQ(*WeightedEnsemble(m, single), m[0]);
  EXPECT_FALSE(WeightedEnsemble(m, std::vector<double>{0.5, 0.6}).ok());
  EXPECT_FALSE(WeightedEnsemble(m, std::vector<double>{1.5, -0.5}).ok());
  EXPECT_FALSE(WeightedEnsemble(m, std::vector<double>{1.0}).ok());
  EXPECT_TRUE(
      ValidateEnsembleWeights(std::vector<double>{0.18, 0.42, 0.12, 0.28})
          .ok());
}

TEST(EnsembleEvalTest, QuantileInterpolates) {
  const std::vector<double> s = {1.0, 2.0, 4.0, 8.0};
  EXPECT_DOUBLE_EQ(Quantile(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Quantile(s, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(Quantile(s, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(Quantile(s, 0.25), 1.75);
}

TEST(EnsembleEvalTest, BootstrapMatchesPerIterationOracle) {
  Rng rng(4);
  const std::vector<PredictionTriple> preds = RandomPreds(rng, 40);
  const std::vector<Label> labels = RandomLabels(rng, 40);
  BootstrapOptions options{
      .sample_size = 25, .iterations = 200, .seed = 77, .reference = 1.0};
  const BootstrapSummary serial = *BootstrapScore(preds, labels,
                                                  {.sample_size = 25,
                                                   .iterations = 200,
                                                   .seed = 77,
                                                   .reference = 1.0,
                                                   .parallel = false});
  const BootstrapSummary parallel = *BootstrapScore(preds, labels, options);
  EXPECT_EQ(serial.ToJson(), parallel.ToJson());

  std::vector<double> expected;
  const std::vector<double> rows = [&] {
    std::vector<double> r;
    for (size_t i = 0; i < preds.size(); ++i) {
      r.push_back(RowLogLoss(preds[i], labels[i]));
    }
    return r;
  }();
  double below = 0.0;
  double mean = 0.0;
  for (int i = 0; i < 200; ++i) {
    Rng it(MixSeed(77 + static_cast<uint64_t>(i)));
    double sum = 0.0;
    for (int k = 0; k < 25; ++k) sum += rows[it.UniformIndex(40)];
    expected.push_back(sum / 25.0);
    mean += expected.back() / 200.0;
    below += expected.back() < 1.0;
  }
  std::sort(expected.begin(), expected.end());
  EXPECT_NEAR(serial.mean, mean, 1e-12);
  EXPECT_NEAR(serial.q500, Quantile(expected, 0.5), 1e-12);
  EXPECT_NEAR(*serial.fraction_below_reference, below / 200.0, 1e-15);
  EXPECT_NEAR(serial.point, LogLoss(preds, labels)->mean, 1e-15);
  EXPECT_LE(serial.q025, serial.q500);
  EXPECT_LE(serial.q500, serial.q975);
}

TEST(EnsembleEvalTest, LengthHistogramFromHandCounts) {
  std::vector<GapExample> examples(4);
  examples[0].text = std::string(5, 'x');
  examples[1].text = std::string(120, 'x');
  examples[2].text = std::string(399, 'x');
  examples[3].text = std::string(100, 'x');
  const std::vector<HistogramBin> bins = *LengthHistogram(examples, 100);
  const std::vector<HistogramBin> expected = {
      {0, 100, 1}, {100, 200, 2}, {200, 300, 0}, {300, 400, 1}};
  EXPECT_EQ(bins, expected);
  EXPECT_EQ(HistogramCsv(bins),
            "bin_start,bin_end,count\n0,100,1\n100,200,2\n200,300,0\n"
            "300,400,1\n");
  EXPECT_TRUE(LengthHistogram({}, 100)->empty());
  EXPECT_FALSE(LengthHistogram(examples, 0).ok());
}

TEST(EnsembleEvalTest, SubmissionCsvRoundTripsExactly) {
  Rng rng(5);
  std::vector<SubmissionRow> rows;
  for (const PredictionTriple& p : RandomPreds(rng, 10)) {
    rows.push_back({"id-" + std::to_string(rows.size()), p});
  }
  const std::string csv = SubmissionCsv(rows);
  EXPECT_TRUE(csv.starts_with("ID,A,B,NEITHER\n"));
  const std::vector<SubmissionRow> back = *ParseSubmissionCsv(csv);
  ASSERT_EQ(back.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].id, rows[i].id);
    EXPECT_EQ(back[i].probs, rows[i].probs);
  }
  EXPECT_FALSE(ParseSubmissionCsv("ID,A,B\nx,1,2\n").ok());
  EXPECT_FALSE(ParseSubmissionCsv("ID,A,B,NEITHER\nx,1,q,2\n").ok());
}

}  // namespace
}  // namespace gapanon
