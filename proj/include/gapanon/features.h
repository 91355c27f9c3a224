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

#ifndef GAPANON_FEATURES_H_
#define GAPANON_FEATURES_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gapanon/anonymizer.h"

namespace gapanon {

// Signed count of whitespace-delimited tokens lying strictly between the two
// spans; positive when `first` precedes `second`. Overlapping spans give 0.
int TokenDistance(std::u32string_view text, Span first, Span second);

// True iff every word of `name` is a whole word of the URL once underscores
// become spaces, ignoring case. An empty URL never matches.
bool NameInUrl(std::string_view name, std::string_view url);

// |dist| bucketed as 0, 1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+.
inline constexpr int kNumDistanceBuckets = 10;
int BucketDistance(int dist);

// Syntactic features for one (name, pronoun) pair. Implementations supply a
// fixed-width vector.
class LinguisticFeatureProvider {
 public:
  virtual ~LinguisticFeatureProvider() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> Compute(std::u32string_view text, Span name,
                                      Span pronoun) const = 0;
};

// Zero vector of a configurable width (0 by default).
class ZeroLinguisticFeatures : public LinguisticFeatureProvider {
 public:
  explicit ZeroLinguisticFeatures(int dim = 0) : dim_(dim) {}
  int dim() const override { return dim_; }
  std::vector<double> Compute(std::u32string_view, Span, Span) const override {
    return std::vector<double>(static_cast<size_t>(dim_), 0.0);
  }

 private:
  int dim_;
};

struct PairFeatures {
  int distance = 0;  // name -> pronoun
  int bucket = 0;
  bool in_url = false;
  std::vector<double> linguistic;

  // one-hot bucket (10), sign bit, in-URL bit, linguistic.
  std::vector<double> Encode() const;
};

struct HandFeatures {
  PairFeatures a;
  PairFeatures b;
};

inline int EncodedPairFeatureDim(int linguistic_dim) {
  return kNumDistanceBuckets + 2 + linguistic_dim;
}

// Distances come from the variant text; URL membership from the original
// candidate names, since URLs are not anonymized.
absl::StatusOr<HandFeatures> ComputeHandFeatures(
    const GapExample& example, const AugmentedVariant& variant,
    const LinguisticFeatureProvider& linguistic);

// CSV row: id,variant,dist_a,dist_b,bucket_a,bucket_b,a_in_url,b_in_url
std::string HandFeaturesCsvHeader();
std::string HandFeaturesCsvRow(std::string_view id, int variant,
                               const HandFeatures& features);

}  // namespace gapanon

#endif  // GAPANON_FEATURES_H_
