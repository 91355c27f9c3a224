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

#ifndef GAPANON_ENSEMBLE_EVAL_H_
#define GAPANON_ENSEMBLE_EVAL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gapanon/corpus.h"
#include "gapanon/prediction.h"
#include "nlohmann/json.hpp"

namespace gapanon {

// Per-class mean of the TTA predictions for one example, renormalized.
absl::StatusOr<PredictionTriple> TtaAggregate(
    std::span<const PredictionTriple> variants);

// Convex combination of per-model predictions. Weights must be
// non-negative and sum to 1 within 1e-6.
absl::StatusOr<PredictionTriple> WeightedEnsemble(
    std::span<const PredictionTriple> per_model,
    std::span<const double> weights);

absl::Status ValidateEnsembleWeights(std::span<const double> weights);

// Probability floor in [0, 1/3).
class ClipThreshold {
 public:
  static constexpr double kDefault = 0.005;

  static absl::StatusOr<ClipThreshold> Create(double value);
  static ClipThreshold Default() { return ClipThreshold(kDefault); }
  static ClipThreshold None() { return ClipThreshold(0.0); }

  double value() const { return value_; }

 private:
  explicit ClipThreshold(double value) : value_(value) {}
  double value_;
};

// Raises each component to at least the threshold; no renormalization.
PredictionTriple ClipProbs(const PredictionTriple& triple,
                           ClipThreshold threshold);

struct LogLossResult {
  // +inf when any row put zero probability on its true class.
  double mean = 0.0;
  size_t infinite_rows = 0;
};

// -ln of the true-class probability after renormalizing each row to sum 1.
double RowLogLoss(const PredictionTriple& p, Label label);

absl::StatusOr<LogLossResult> LogLoss(std::span<const PredictionTriple> preds,
                                      std::span<const Label> labels);

struct EvalReport {
  size_t count = 0;
  double overall = 0.0;
  size_t feminine_count = 0;
  size_t masculine_count = 0;
  std::optional<double> feminine;
  std::optional<double> masculine;
  // masculine / feminine.
  std::optional<double> bias;
  size_t infinite_rows = 0;
  // Mean predicted probability of A, B and Neither.
  std::array<double, 3> mean_probabilities{};

  nlohmann::json ToJson() const;
};

absl::StatusOr<EvalReport> GenderReport(std::span<const PredictionTriple> preds,
                                        std::span<const Label> labels,
                                        std::span<const std::string> pronouns);

struct BootstrapOptions {
  size_t sample_size = 760;
  int iterations = 10000;
  uint64_t seed = 0;
  std::optional<double> reference;
  bool parallel = true;
};

struct BootstrapSummary {
  double point = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double q025 = 0.0;
  double q500 = 0.0;
  double q975 = 0.0;
  // Fraction of resampled scores strictly below the reference score.
  std::optional<double> fraction_below_reference;
  size_t sample_size = 0;
  int iterations = 0;

  nlohmann::json ToJson() const;
};

// Log loss over `iterations` samples of `sample_size` rows drawn with
// replacement. Iteration i draws from its own generator seeded from
// (seed + i), so results do not depend on scheduling.
absl::StatusOr<BootstrapSummary> BootstrapScore(
    std::span<const PredictionTriple> preds, std::span<const Label> labels,
    const BootstrapOptions& options);

// Empirical quantile with linear interpolation; `sorted` ascending.
double Quantile(std::span<const double> sorted, double q);

struct HistogramBin {
  int64_t begin = 0;  // inclusive
  int64_t end = 0;    // exclusive
  size_t count = 0;
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

inline constexpr int64_t kDefaultHistogramBinWidth = 100;

// Document length in characters, binned [k*w, (k+1)*w). Bins run from the
// shortest to the longest document, including empty ones in between.
absl::StatusOr<std::vector<HistogramBin>> LengthHistogram(
    std::span<const GapExample> examples, int64_t bin_width);
std::string HistogramCsv(std::span<const HistogramBin> bins);

// Submission CSV: "ID,A,B,NEITHER" header then one row per example.
struct SubmissionRow {
  std::string id;
  PredictionTriple probs;
};
std::string SubmissionCsv(std::span<const SubmissionRow> rows);
absl::StatusOr<std::vector<SubmissionRow>> ParseSubmissionCsv(
    std::string_view contents);

}  // namespace gapanon

#endif  // GAPANON_ENSEMBLE_EVAL_H_
