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

#ifndef GAPANON_PARALLEL_H_
#define GAPANON_PARALLEL_H_

// Data-parallel kernels. Each has a serial reference with identical
// semantics; the OpenMP versions write results by index so their output is
// bit-identical to the serial one regardless of thread count.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gapanon/anonymizer.h"
#include "gapanon/models.h"

namespace gapanon {

int MaxThreads();

// Mean of `sample_size` entries of `row_losses` drawn with replacement, once
// per iteration.
std::vector<double> BootstrapReplicatesSerial(
    std::span<const double> row_losses, size_t sample_size, int iterations,
    uint64_t seed);
std::vector<double> BootstrapReplicatesParallel(
    std::span<const double> row_losses, size_t sample_size, int iterations,
    uint64_t seed);

absl::StatusOr<std::vector<PredictionTriple>> PredictBatchSerial(
    const Classifier& net, std::span<const ModelInput> inputs);
absl::StatusOr<std::vector<PredictionTriple>> PredictBatchParallel(
    const Classifier& net, std::span<const ModelInput> inputs);

absl::StatusOr<std::vector<TtaExpansion>> ExpandCorpusSerial(
    std::span<const GapExample> examples, const AnonymizerOptions& options);
absl::StatusOr<std::vector<TtaExpansion>> ExpandCorpusParallel(
    std::span<const GapExample> examples, const AnonymizerOptions& options);

// Runs job(i) for i in [0, n). Returns the first failing status by index.
absl::Status RunJobs(size_t n, const std::function<absl::Status(size_t)>& job,
                     bool parallel);

}  // namespace gapanon

#endif  // GAPANON_PARALLEL_H_
