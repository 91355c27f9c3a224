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

#ifndef GAPANON_TRAINING_H_
#define GAPANON_TRAINING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gapanon/models.h"

namespace gapanon {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 32;
  // Drives the per-epoch shuffle. Net initialization is seeded separately
  // when the net is constructed.
  uint64_t seed = 0;
};

absl::Status ValidateTrainConfig(const TrainConfig& config);

// Mini-batch gradient descent on mean cross-entropy. Returns the mean
// training loss of each epoch, measured during the pass. Aborts with an
// error naming the epoch and batch if the loss becomes non-finite.
absl::StatusOr<std::vector<double>> Train(Classifier& net,
                                          std::span<const LabeledInput> data,
                                          const TrainConfig& config);

// Mean cross-entropy of `net` over `data`, no gradient.
absl::StatusOr<double> MeanLoss(const Classifier& net,
                                std::span<const LabeledInput> data);

}  // namespace gapanon

#endif  // GAPANON_TRAINING_H_
