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

#ifndef GAPANON_TESTS_TESTING_ORACLES_H_
#define GAPANON_TESTS_TESTING_ORACLES_H_

// Reference computations written independently of the library kernels.

#include <array>
#include <span>
#include <vector>

#include "gapanon/corpus.h"
#include "gapanon/models.h"
#include "gapanon/random.h"

namespace gapanon::testing {

// Straight-line forward pass over the flat parameter layout. Appends every
// hidden pre-activation to `pre` when non-null.
std::vector<double> OracleMlp(const std::vector<int>& sizes, bool relu,
                              std::span<const double> params,
                              std::span<const double> x,
                              std::vector<double>* pre = nullptr);

std::array<double, 3> OracleSoftmax(const std::array<double, 3>& z);

std::array<double, 3> OraclePureBert(const PureBertNet& net,
                                     const ModelInput& in,
                                     std::vector<double>* pre = nullptr);
std::array<double, 3> OracleEnd2end(const End2endNet& net, const ModelInput& in,
                                    std::vector<double>* pre = nullptr);

// Central differences of -log p_label computed from Predict(), compared to
// LossAndGradient(). Same relative error as GradientCheck.
double FiniteDifferenceCheck(const Classifier& net, const ModelInput& input,
                             Label label, double step);

ModelInput RandomInput(Rng& rng, int dim, int feature_dim);

// Smallest |pre-activation| over the hidden units touched by `input`. ReLU
// is not differentiable at zero, so finite differences are only meaningful
// when this margin exceeds the perturbation's effect.
double HiddenMargin(const Classifier& net, const ModelInput& input);

// Multinomial logistic regression fit by full-batch gradient descent.
struct LogisticRegression {
  int dim = 0;
  std::vector<double> w;  // 3 x (dim + 1), bias last

  std::array<double, 3> Predict(std::span<const double> x) const;
};
LogisticRegression FitLogisticRegression(
    const std::vector<std::vector<double>>& xs,
    const std::vector<Label>& labels, double learning_rate, int epochs);
double LogisticLoss(const LogisticRegression& model,
                    const std::vector<std::vector<double>>& xs,
                    const std::vector<Label>& labels);

// Mean -log of the true-class probability with per-row renormalization.
double OracleLogLoss(const std::vector<std::array<double, 3>>& probs,
                     const std::vector<Label>& labels);

}  // namespace gapanon::testing

#endif  // GAPANON_TESTS_TESTING_ORACLES_H_
