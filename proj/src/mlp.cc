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

#include "gapanon/mlp.h"

#include <algorithm>
#include <cmath>

namespace gapanon {

Mlp::Mlp(std::vector<int> sizes, Activation hidden)
    : sizes_(std::move(sizes)), hidden_(hidden) {
  size_t total = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::InitGlorot(Rng& rng) {
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double r = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    const size_t w = WeightOffset(l);
    const size_t n = static_cast<size_t>(sizes_[l]) * sizes_[l + 1];
    for (size_t i = 0; i < n; ++i) params_[w + i] = rng.Uniform(-r, r);
    std::fill_n(params_.begin() + BiasOffset(l), sizes_[l + 1], 0.0);
  }
}

std::vector<double> Mlp::Forward(std::span<const double> x, Tape* tape) const {
  std::vector<double> current(x.begin(), x.end());
  if (tape != nullptr) {
    tape->values.clear();
    tape->values.push_back(current);
  }
  const size_t num_layers = sizes_.size() - 1;
  for (size_t l = 0; l < num_layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + WeightOffset(l);
    const double* b = params_.data() + BiasOffset(l);
    std::vector<double> next(static_cast<size_t>(out));
    for (int o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) z += row[i] * current[i];
      next[o] = z;
    }
    if (l + 1 < num_layers && hidden_ == Activation::kRelu) {
      for (double& z : next) z = z > 0.0 ? z : 0.0;
    }
    current = std::move(next);
    if (tape != nullptr) tape->values.push_back(current);
  }
  return current;
}

void Mlp::Backward(const Tape& tape, std::span<const double> grad_output,
                   std::span<double> grad_params,
                   std::vector<double>* grad_input) const {
  const size_t num_layers = sizes_.size() - 1;
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  for (size_t l = num_layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    // Output values of a ReLU layer are zero exactly where the unit is off.
    if (l + 1 < num_layers && hidden_ == Activation::kRelu) {
      const std::vector<double>& y = tape.values[l + 1];
      for (int o = 0; o < out; ++o) {
        if (y[o] <= 0.0) delta[o] = 0.0;
      }
    }
    const std::vector<double>& x = tape.values[l];
    double* gw = grad_params.data() + WeightOffset(l);
    double* gb = grad_params.data() + BiasOffset(l);
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* row = gw + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) row[i] += d * x[i];
    }
    if (l == 0 && grad_input == nullptr) break;
    const double* w = params_.data() + WeightOffset(l);
    std::vector<double> prev(static_cast<size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev[i] += d * row[i];
    }
    delta = std::move(prev);
  }
  if (grad_input != nullptr) *grad_input = std::move(delta);
}

}  // namespace gapanon
