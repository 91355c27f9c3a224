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

#ifndef GAPANON_PREDICTION_H_
#define GAPANON_PREDICTION_H_

#include <array>

#include "gapanon/corpus.h"

namespace gapanon {

// Class probabilities in label order (A, B, Neither).
struct PredictionTriple {
  std::array<double, 3> p{};

  double a() const { return p[0]; }
  double b() const { return p[1]; }
  double neither() const { return p[2]; }
  double operator[](Label label) const { return p[static_cast<int>(label)]; }
  double sum() const { return p[0] + p[1] + p[2]; }

  static PredictionTriple Uniform() { return {{1.0 / 3, 1.0 / 3, 1.0 / 3}}; }

  friend bool operator==(const PredictionTriple&,
                         const PredictionTriple&) = default;
};

}  // namespace gapanon

#endif  // GAPANON_PREDICTION_H_
