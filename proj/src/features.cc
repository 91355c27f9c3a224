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

#include "gapanon/features.h"

#include <algorithm>
#include <cstdlib>

#include "gapanon/strings.h"
#include "gapanon/utf8.h"

namespace gapanon {
namespace {

int CountTokens(std::u32string_view text, int64_t begin, int64_t end) {
  int tokens = 0;
  bool in_token = false;
  for (int64_t i = begin; i < end; ++i) {
    const bool space = IsSpace(text[static_cast<size_t>(i)]);
    if (!space && !in_token) ++tokens;
    in_token = !space;
  }
  return tokens;
}

}  // namespace

int TokenDistance(std::u32string_view text, Span first, Span second) {
  if (first.Overlaps(second) || first == second) return 0;
  const int64_t n = static_cast<int64_t>(text.size());
  if (first.end <= second.begin) {
    return CountTokens(text, std::clamp<int64_t>(first.end, 0, n),
                       std::clamp<int64_t>(second.begin, 0, n));
  }
  return -CountTokens(text, std::clamp<int64_t>(second.end, 0, n),
                      std::clamp<int64_t>(first.begin, 0, n));
}

bool NameInUrl(std::string_view name, std::string_view url) {
  if (url.empty()) return false;
  std::string haystack = str::Lower(url);
  std::replace(haystack.begin(), haystack.end(), '_', ' ');
  absl::StatusOr<std::u32string> text = DecodeUtf8(haystack);
  if (!text.ok()) return false;
  bool any_word = false;
  for (std::string_view word : str::SplitWhitespace(name)) {
    any_word = true;
    absl::StatusOr<std::u32string> w = DecodeUtf8(str::Lower(word));
    if (!w.ok() || FindWholeWord(*text, *w).empty()) return false;
  }
  return any_word;
}

int BucketDistance(int dist) {
  const int d = std::abs(dist);
  if (d <= 4) return d;
  if (d <= 7) return 5;
  if (d <= 15) return 6;
  if (d <= 31) return 7;
  if (d <= 63) return 8;
  return 9;
}

std::vector<double> PairFeatures::Encode() const {
  std::vector<double> v(kNumDistanceBuckets + 2, 0.0);
  v[static_cast<size_t>(bucket)] = 1.0;
  v[kNumDistanceBuckets] = distance < 0 ? 1.0 : 0.0;
  v[kNumDistanceBuckets + 1] = in_url ? 1.0 : 0.0;
  v.insert(v.end(), linguistic.begin(), linguistic.end());
  return v;
}

absl::StatusOr<HandFeatures> ComputeHandFeatures(
    const GapExample& example, const AugmentedVariant& variant,
    const LinguisticFeatureProvider& linguistic) {
  absl::StatusOr<std::u32string> text = DecodeUtf8(variant.text);
  if (!text.ok()) return text.status();
  auto span_of = [](int64_t offset,
                    const std::string& surface) -> absl::StatusOr<Span> {
    absl::StatusOr<size_t> len = Utf8Length(surface);
    if (!len.ok()) return len.status();
    return Span{offset, offset + static_cast<int64_t>(*len)};
  };
  absl::StatusOr<Span> a = span_of(variant.a_offset, variant.a_name);
  absl::StatusOr<Span> b = span_of(variant.b_offset, variant.b_name);
  absl::StatusOr<Span> p = span_of(variant.pronoun_offset, variant.pronoun);
  for (const auto* s : {&a, &b, &p}) {
    if (!s->ok()) return s->status();
    if ((*s)->begin < 0 || static_cast<size_t>((*s)->end) > text->size()) {
      return absl::InvalidArgumentError(
          str::Cat(variant.id, ": mention span outside variant text"));
    }
  }
  HandFeatures f;
  f.a.distance = TokenDistance(*text, *a, *p);
  f.b.distance = TokenDistance(*text, *b, *p);
  f.a.bucket = BucketDistance(f.a.distance);
  f.b.bucket = BucketDistance(f.b.distance);
  f.a.in_url = NameInUrl(example.name_a, example.url);
  f.b.in_url = NameInUrl(example.name_b, example.url);
  f.a.linguistic = linguistic.Compute(*text, *a, *p);
  f.b.linguistic = linguistic.Compute(*text, *b, *p);
  return f;
}

std::string HandFeaturesCsvHeader() {
  return "id,variant,dist_a,dist_b,bucket_a,bucket_b,a_in_url,b_in_url";
}

std::string HandFeaturesCsvRow(std::string_view id, int variant,
                               const HandFeatures& f) {
  return str::Cat(id, ",", variant, ",", f.a.distance, ",", f.b.distance, ",",
                  f.a.bucket, ",", f.b.bucket, ",", f.a.in_url ? 1 : 0, ",",
                  f.b.in_url ? 1 : 0);
}

}  // namespace gapanon
