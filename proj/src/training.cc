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

#include "gapanon/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gapanon/random.h"
#include "gapanon/strings.h"

namespace gapanon {

absl::Status ValidateTrainConfig(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (config.epochs < 0) {
    return absl::InvalidArgumentError("epochs must be non-negative");
  }
  if (config.batch_size <= 0) {
    return absl::InvalidArgumentError("batch size must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> Train(Classifier& net,
                                          std::span<const LabeledInput> data,
                                          const TrainConfig& config) {
  if (absl::Status s = ValidateTrainConfig(config); !s.ok()) return s;
  if (data.empty()) return absl::InvalidArgumentError("empty training set");
  for (const LabeledInput& sample : data) {
    if (sample.input == nullptr) {
      return absl::InvalidArgumentError("training sample without input");
    }
    if (absl::Status s = net.CheckInput(*sample.input); !s.ok()) return s;
  }

  Rng rng(config.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> grad(net.params().size());
  std::vector<double> trace;
  trace.reserve(static_cast<size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(
          order.size(), start + static_cast<size_t>(config.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        const LabeledInput& sample = data[order[i]];
        batch_loss += net.LossAndGradient(*sample.input, sample.label, grad);
      }
      if (!std::isfinite(batch_loss)) {
        return absl::InternalError(
            str::Cat("non-finite training loss at epoch ", epoch,
                     ", batch starting at ", start));
      }
      epoch_loss += batch_loss;
      const double scale =
          config.learning_rate / static_cast<double>(end - start);
      std::span<double> params = net.params();
      for (size_t k = 0; k < params.size(); ++k) params[k] -= scale * grad[k];
    }
    trace.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return trace;
}

absl::StatusOr<double> MeanLoss(const Classifier& net,
                                std::span<const LabeledInput> data) {
  if (data.empty()) return absl::InvalidArgumentError("empty data set");
  double total = 0.0;
  for (const LabeledInput& sample : data) {
    absl::StatusOr<PredictionTriple> p = net.Predict(*sample.input);
    if (!p.ok()) return p.status();
    total -= std::log((*p)[sample.label]);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace gapanon
