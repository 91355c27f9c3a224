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

#ifndef GAPANON_MLP_H_
#define GAPANON_MLP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "gapanon/random.h"

namespace gapanon {

enum class Activation { kRelu, kIdentity };

// Fully connected network. Hidden layers use `hidden`; the output layer is
// always linear. Parameters live in one flat vector, per layer the weight
// matrix (out x in, row-major) followed by the bias.
class Mlp {
 public:
  // Activations recorded by a forward pass; values[0] is the input.
  struct Tape {
    std::vector<std::vector<double>> values;
  };

  Mlp() = default;
  // Zero parameters.
  Mlp(std::vector<int> sizes, Activation hidden);

  // Uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)); biases zero.
  void InitGlorot(Rng& rng);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Caller guarantees x.size() == input_dim().
  std::vector<double> Forward(std::span<const double> x,
                              Tape* tape = nullptr) const;

  // Adds dLoss/dparams into `grad_params` (size params().size()). If
  // `grad_input` is non-null it receives dLoss/dx.
  void Backward(const Tape& tape, std::span<const double> grad_output,
                std::span<double> grad_params,
                std::vector<double>* grad_input = nullptr) const;

 private:
  size_t WeightOffset(size_t layer) const { return offsets_[layer]; }
  size_t BiasOffset(size_t layer) const {
    return offsets_[layer] +
           static_cast<size_t>(sizes_[layer]) * sizes_[layer + 1];
  }

  std::vector<int> sizes_;
  Activation hidden_ = Activation::kRelu;
  std::vector<size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace gapanon

#endif  // GAPANON_MLP_H_
