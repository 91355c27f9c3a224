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

#include "gapanon/parallel.h"

#include <omp.h>

#include "gapanon/random.h"

namespace gapanon {
namespace {

double ReplicateMean(std::span<const double> row_losses, size_t sample_size,
                     uint64_t seed) {
  Rng rng(MixSeed(seed));
  double sum = 0.0;
  for (size_t k = 0; k < sample_size; ++k) {
    sum += row_losses[rng.UniformIndex(row_losses.size())];
  }
  return sum / static_cast<double>(sample_size);
}

}  // namespace

int MaxThreads() { return omp_get_max_threads(); }

std::vector<double> BootstrapReplicatesSerial(
    std::span<const double> row_losses, size_t sample_size, int iterations,
    uint64_t seed) {
  std::vector<double> out(static_cast<size_t>(std::max(iterations, 0)));
  if (row_losses.empty() || sample_size == 0) return out;
  for (int i = 0; i < iterations; ++i) {
    out[i] = ReplicateMean(row_losses, sample_size, seed + i);
  }
  return out;
}

std::vector<double> BootstrapReplicatesParallel(
    std::span<const double> row_losses, size_t sample_size, int iterations,
    uint64_t seed) {
  std::vector<double> out(static_cast<size_t>(std::max(iterations, 0)));
  if (row_losses.empty() || sample_size == 0) return out;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < iterations; ++i) {
    out[i] = ReplicateMean(row_losses, sample_size, seed + i);
  }
  return out;
}

absl::StatusOr<std::vector<PredictionTriple>> PredictBatchSerial(
    const Classifier& net, std::span<const ModelInput> inputs) {
  std::vector<PredictionTriple> out(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    absl::StatusOr<PredictionTriple> p = net.Predict(inputs[i]);
    if (!p.ok()) return p.status();
    out[i] = *p;
  }
  return out;
}

absl::StatusOr<std::vector<PredictionTriple>> PredictBatchParallel(
    const Classifier& net, std::span<const ModelInput> inputs) {
  std::vector<PredictionTriple> out(inputs.size());
  std::vector<absl::Status> status(inputs.size());
  const int64_t n = static_cast<int64_t>(inputs.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    absl::StatusOr<PredictionTriple> p = net.Predict(inputs[i]);
    if (p.ok()) {
      out[i] = *p;
    } else {
      status[i] = p.status();
    }
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return out;
}

absl::StatusOr<std::vector<TtaExpansion>> ExpandCorpusSerial(
    std::span<const GapExample> examples, const AnonymizerOptions& options) {
  std::vector<TtaExpansion> out;
  out.reserve(examples.size());
  for (const GapExample& e : examples) {
    absl::StatusOr<TtaExpansion> x = ExpandWithTta(e, options);
    if (!x.ok()) return x.status();
    out.push_back(*std::move(x));
  }
  return out;
}

absl::StatusOr<std::vector<TtaExpansion>> ExpandCorpusParallel(
    std::span<const GapExample> examples, const AnonymizerOptions& options) {
  std::vector<TtaExpansion> out(examples.size());
  std::vector<absl::Status> status(examples.size());
  const int64_t n = static_cast<int64_t>(examples.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i) {
    absl::StatusOr<TtaExpansion> x = ExpandWithTta(examples[i], options);
    if (x.ok()) {
      out[i] = *std::move(x);
    } else {
      status[i] = x.status();
    }
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return out;
}

absl::Status RunJobs(size_t n, const std::function<absl::Status(size_t)>& job,
                     bool parallel) {
  std::vector<absl::Status> status(n);
  const int64_t count = static_cast<int64_t>(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int64_t i = 0; i < count; ++i) status[i] = job(static_cast<size_t>(i));
  } else {
    for (int64_t i = 0; i < count; ++i) status[i] = job(static_cast<size_t>(i));
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace gapanon
