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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "gapanon/anonymizer.h"
#include "gapanon/parallel.h"
#include "gapanon/strings.h"
#include "gapanon/utf8.h"

namespace gapanon {
namespace {

PredictionTriple Normalized(const PredictionTriple& t) {
  const double s = t.sum();
  return {{t.p[0] / s, t.p[1] / s, t.p[2] / s}};
}

absl::Status CheckTriple(const PredictionTriple& t) {
  for (const double x : t.p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      return absl::InvalidArgumentError(
          "prediction has a negative or non-finite component");
    }
  }
  if (!(t.sum() > 0.0)) {
    return absl::InvalidArgumentError("prediction sums to zero");
  }
  return absl::OkStatus();
}

std::optional<double> Mean(const std::vector<double>& losses) {
  if (losses.empty()) return std::nullopt;
  double s = 0.0;
  for (const double x : losses) s += x;
  return s / static_cast<double>(losses.size());
}

}  // namespace

absl::StatusOr<PredictionTriple> TtaAggregate(
    std::span<const PredictionTriple> variants) {
  if (variants.empty()) {
    return absl::InvalidArgumentError("TTA aggregate of zero predictions");
  }
  PredictionTriple mean{{0.0, 0.0, 0.0}};
  for (const PredictionTriple& t : variants) {
    if (absl::Status s = CheckTriple(t); !s.ok()) return s;
    for (int c = 0; c < 3; ++c) mean.p[c] += t.p[c];
  }
  for (double& x : mean.p) x /= static_cast<double>(variants.size());
  return Normalized(mean);
}

absl::Status ValidateEnsembleWeights(std::span<const double> weights) {
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("ensemble weights must be >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    return absl::InvalidArgumentError(
        str::Cat("ensemble weights sum to ", sum, ", expected 1"));
  }
  return absl::OkStatus();
}

absl::StatusOr<PredictionTriple> WeightedEnsemble(
    std::span<const PredictionTriple> per_model,
    std::span<const double> weights) {
  if (per_model.size() != weights.size()) {
    return absl::InvalidArgumentError(str::Cat(
        per_model.size(), " predictions but ", weights.size(), " weights"));
  }
  if (absl::Status s = ValidateEnsembleWeights(weights); !s.ok()) return s;
  PredictionTriple out{{0.0, 0.0, 0.0}};
  for (size_t m = 0; m < per_model.size(); ++m) {
    for (int c = 0; c < 3; ++c) out.p[c] += weights[m] * per_model[m].p[c];
  }
  return out;
}

absl::StatusOr<ClipThreshold> ClipThreshold::Create(double value) {
  if (!(value >= 0.0 && value < 1.0 / 3.0)) {
    return absl::InvalidArgumentError(
        str::Cat("clip threshold ", value, " outside [0, 1/3)"));
  }
  return ClipThreshold(value);
}

PredictionTriple ClipProbs(const PredictionTriple& triple,
                           ClipThreshold threshold) {
  PredictionTriple out = triple;
  for (double& x : out.p) x = std::max(x, threshold.value());
  return out;
}

double RowLogLoss(const PredictionTriple& p, Label label) {
  const double q = p[label] / p.sum();
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(q);
}

absl::StatusOr<LogLossResult> LogLoss(std::span<const PredictionTriple> preds,
                                      std::span<const Label> labels) {
  if (preds.size() != labels.size()) {
    return absl::InvalidArgumentError(
        str::Cat(preds.size(), " predictions but ", labels.size(), " labels"));
  }
  if (preds.empty()) return absl::InvalidArgumentError("no predictions");
  LogLossResult result;
  double total = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (absl::Status s = CheckTriple(preds[i]); !s.ok()) return s;
    const double loss = RowLogLoss(preds[i], labels[i]);
    if (std::isinf(loss)) ++result.infinite_rows;
    total += loss;
  }
  result.mean = total / static_cast<double>(preds.size());
  return result;
}

absl::StatusOr<EvalReport> GenderReport(std::span<const PredictionTriple> preds,
                                        std::span<const Label> labels,
                                        std::span<const std::string> pronouns) {
  if (pronouns.size() != preds.size()) {
    return absl::InvalidArgumentError(str::Cat(
        preds.size(), " predictions but ", pronouns.size(), " pronouns"));
  }
  absl::StatusOr<LogLossResult> overall = LogLoss(preds, labels);
  if (!overall.ok()) return overall.status();
  EvalReport report;
  report.count = preds.size();
  report.overall = overall->mean;
  report.infinite_rows = overall->infinite_rows;
  std::vector<double> feminine;
  std::vector<double> masculine;
  for (size_t i = 0; i < preds.size(); ++i) {
    const double loss = RowLogLoss(preds[i], labels[i]);
    if (PronounGenderOf(pronouns[i]) == PronounGender::kMasculine) {
      masculine.push_back(loss);
    } else {
      feminine.push_back(loss);
    }
    const PredictionTriple n = Normalized(preds[i]);
    for (int c = 0; c < 3; ++c) report.mean_probabilities[c] += n.p[c];
  }
  for (double& x : report.mean_probabilities) {
    x /= static_cast<double>(preds.size());
  }
  report.feminine_count = feminine.size();
  report.masculine_count = masculine.size();
  report.feminine = Mean(feminine);
  report.masculine = Mean(masculine);
  if (report.feminine && report.masculine && *report.feminine > 0.0) {
    report.bias = *report.masculine / *report.feminine;
  }
  return report;
}

nlohmann::json EvalReport::ToJson() const {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
  };
  nlohmann::json j{{"count", count},
                   {"overall", std::isfinite(overall) ? nlohmann::json(overall)
                                                      : nlohmann::json("inf")},
                   {"feminine", opt(feminine)},
                   {"masculine", opt(masculine)},
                   {"bias", opt(bias)},
                   {"feminine_count", feminine_count},
                   {"masculine_count", masculine_count},
                   {"infinite_rows", infinite_rows},
                   {"mean_probabilities",
                    {{"A", mean_probabilities[0]},
                     {"B", mean_probabilities[1]},
                     {"NEITHER", mean_probabilities[2]}}}};
  return j;
}

double Quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

absl::StatusOr<BootstrapSummary> BootstrapScore(
    std::span<const PredictionTriple> preds, std::span<const Label> labels,
    const BootstrapOptions& options) {
  absl::StatusOr<LogLossResult> point = LogLoss(preds, labels);
  if (!point.ok()) return point.status();
  if (options.iterations <= 0 || options.sample_size == 0) {
    return absl::InvalidArgumentError(
        "bootstrap needs positive iterations and sample size");
  }
  std::vector<double> row_losses(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    row_losses[i] = RowLogLoss(preds[i], labels[i]);
  }
  std::vector<double> scores =
      options.parallel
          ? BootstrapReplicatesParallel(row_losses, options.sample_size,
                                        options.iterations, options.seed)
          : BootstrapReplicatesSerial(row_losses, options.sample_size,
                                      options.iterations, options.seed);

  BootstrapSummary summary;
  summary.point = point->mean;
  summary.sample_size = options.sample_size;
  summary.iterations = options.iterations;
  double sum = 0.0;
  for (const double s : scores) sum += s;
  summary.mean = sum / static_cast<double>(scores.size());
  double ss = 0.0;
  for (const double s : scores) ss += (s - summary.mean) * (s - summary.mean);
  summary.stddev = scores.size() > 1
                       ? std::sqrt(ss / static_cast<double>(scores.size() - 1))
                       : 0.0;
  if (options.reference) {
    const size_t below = static_cast<size_t>(
        std::count_if(scores.begin(), scores.end(),
                      [&](double s) { return s < *options.reference; }));
    summary.fraction_below_reference =
        static_cast<double>(below) / static_cast<double>(scores.size());
  }
  std::sort(scores.begin(), scores.end());
  summary.q025 = Quantile(scores, 0.025);
  summary.q500 = Quantile(scores, 0.5);
  summary.q975 = Quantile(scores, 0.975);
  return summary;
}

nlohmann::json BootstrapSummary::ToJson() const {
  nlohmann::json j{{"point", point},
                   {"mean", mean},
                   {"stddev", stddev},
                   {"q025", q025},
                   {"q500", q500},
                   {"q975", q975},
                   {"sample_size", sample_size},
                   {"iterations", iterations}};
  j["fraction_below_reference"] =
      fraction_below_reference ? nlohmann::json(*fraction_below_reference)
                               : nlohmann::json(nullptr);
  return j;
}

absl::StatusOr<std::vector<HistogramBin>> LengthHistogram(
    std::span<const GapExample> examples, int64_t bin_width) {
  if (bin_width <= 0) {
    return absl::InvalidArgumentError("histogram bin width must be positive");
  }
  std::vector<HistogramBin> bins;
  if (examples.empty()) return bins;
  std::vector<int64_t> lengths;
  lengths.reserve(examples.size());
  for (const GapExample& e : examples) {
    absl::StatusOr<size_t> len = Utf8Length(e.text);
    if (!len.ok()) return len.status();
    lengths.push_back(static_cast<int64_t>(*len));
  }
  const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
  const int64_t first = *lo / bin_width;
  const int64_t last = *hi / bin_width;
  for (int64_t k = first; k <= last; ++k) {
    bins.push_back({k * bin_width, (k + 1) * bin_width, 0});
  }
  for (const int64_t len : lengths) ++bins[len / bin_width - first].count;
  return bins;
}

std::string HistogramCsv(std::span<const HistogramBin> bins) {
  std::string out = "bin_start,bin_end,count\n";
  for (const HistogramBin& b : bins) {
    str::Append(&out, b.begin, ",", b.end, ",", b.count, "\n");
  }
  return out;
}

std::string SubmissionCsv(std::span<const SubmissionRow> rows) {
  std::string out = "ID,A,B,NEITHER\n";
  for (const SubmissionRow& r : rows) {
    str::Append(&out, r.id, ",", fmt::sprintf("%.17g", r.probs.p[0]), ",",
                fmt::sprintf("%.17g", r.probs.p[1]), ",",
                fmt::sprintf("%.17g", r.probs.p[2]), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<SubmissionRow>> ParseSubmissionCsv(
    std::string_view contents) {
  std::vector<SubmissionRow> rows;
  size_t line_no = 0;
  for (std::string_view line : str::Split(contents, '\n')) {
    ++line_no;
    line = str::StripTrailing(line);
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = str::Split(line, ',');
    if (line_no == 1) {
      if (fields.size() != 4 || fields[0] != "ID" || fields[1] != "A" ||
          fields[2] != "B" || fields[3] != "NEITHER") {
        return absl::InvalidArgumentError(
            "submission header must be ID,A,B,NEITHER");
      }
      continue;
    }
    if (fields.size() != 4) {
      return absl::InvalidArgumentError(
          str::Cat("submission line ", line_no, ": expected 4 columns"));
    }
    SubmissionRow row;
    row.id = std::string(fields[0]);
    for (int c = 0; c < 3; ++c) {
      if (!str::ParseDouble(fields[c + 1], &row.probs.p[c])) {
        return absl::InvalidArgumentError(str::Cat("submission line ", line_no,
                                                   ": bad probability '",
                                                   fields[c + 1], "'"));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gapanon
