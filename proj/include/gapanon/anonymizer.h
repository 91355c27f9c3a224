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

#ifndef GAPANON_ANONYMIZER_H_
#define GAPANON_ANONYMIZER_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gapanon/corpus.h"
#include "nlohmann/json.hpp"

namespace gapanon {

enum class PronounGender { kMasculine, kFeminine };

// Masculine iff the pronoun is he/him/his, ignoring case.
PronounGender PronounGenderOf(std::string_view pronoun);

struct NamePair {
  std::string for_a;
  std::string for_b;
};

struct PlaceholderSet {
  int set_id = 0;
  NamePair feminine;
  NamePair masculine;

  const NamePair& ForGender(PronounGender gender) const {
    return gender == PronounGender::kMasculine ? masculine : feminine;
  }
};

// The four anonymization sets, ids 0..3:
//   F: Alice, Kate        M: John, Michael
//   F: Elizabeth, Mary    M: James, Henry
//   F: Kate, Elizabeth    M: Michael, James
//   F: Mary, Alice        M: Henry, John
const std::array<PlaceholderSet, 4>& DefaultPlaceholderSets();

enum class SkipReason : uint8_t {
  kCond1 = 1 << 0,  // a placeholder already occurs in the document
  kCond2 = 1 << 1,  // a two-word name has a lone first/last word elsewhere
  kCond3 = 1 << 2,  // a name has more than two words
  kCond4 = 1 << 3,  // one name contains the other, or mention spans overlap
};

class SkipReasons {
 public:
  SkipReasons() = default;

  void Add(SkipReason r) { bits_ |= static_cast<uint8_t>(r); }
  bool Has(SkipReason r) const { return bits_ & static_cast<uint8_t>(r); }
  bool empty() const { return bits_ == 0; }
  uint8_t bits() const { return bits_; }

  // ["Cond1", ...] in condition order.
  std::vector<std::string> Names() const;
  static absl::StatusOr<SkipReasons> FromNames(
      std::span<const std::string> names);

  friend bool operator==(SkipReasons, SkipReasons) = default;

 private:
  uint8_t bits_ = 0;
};

// Half-open range of scalar-value indices.
struct Span {
  int64_t begin = 0;
  int64_t end = 0;

  int64_t size() const { return end - begin; }
  bool Overlaps(const Span& o) const { return begin < o.end && o.begin < end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class OccurrenceKind { kFull, kLoneFirst, kLoneLast };

struct NameOccurrence {
  Span span;
  OccurrenceKind kind = OccurrenceKind::kFull;
  friend bool operator==(const NameOccurrence&,
                         const NameOccurrence&) = default;
};

struct NameOccurrences {
  std::vector<NameOccurrence> a;
  std::vector<NameOccurrence> b;
};

// Case-sensitive whole-word matches of `word`. A match must not be preceded
// or followed by a letter, digit, or an apostrophe/hyphen joined to a letter,
// with one exception: a trailing possessive ('s, ’s) is allowed.
std::vector<Span> FindWholeWord(std::u32string_view text,
                                std::u32string_view word);

// Whole-word occurrences of each candidate name, plus, for two-word names,
// occurrences of the first or last word standing alone (not inside a full
// occurrence of either name). Sorted by start, non-overlapping per name.
NameOccurrences FindNameOccurrences(std::u32string_view text,
                                    std::u32string_view name_a,
                                    std::u32string_view name_b);
absl::StatusOr<NameOccurrences> FindNameOccurrences(std::string_view text,
                                                    std::string_view name_a,
                                                    std::string_view name_b);

// Whitespace-separated word count.
int WordCount(std::u32string_view name);

struct AnonymizerOptions {
  // Condition 1 scans all four names of a set instead of the pair selected
  // by pronoun gender.
  bool cond1_all_names = false;
};

// An example decoded once so the four sets can be checked and applied
// without re-scanning the text.
class PreparedExample {
 public:
  static absl::StatusOr<PreparedExample> Create(const GapExample& example);

  const GapExample& source() const { return source_; }
  const std::u32string& text() const { return text_; }
  const std::u32string& name_a() const { return name_a_; }
  const std::u32string& name_b() const { return name_b_; }
  PronounGender gender() const { return gender_; }
  const NameOccurrences& occurrences() const { return occurrences_; }
  Span a_span() const { return a_span_; }
  Span b_span() const { return b_span_; }
  Span pronoun_span() const { return pronoun_span_; }
  // Set-independent conditions (2, 3 and 4).
  SkipReasons static_reasons() const { return static_reasons_; }

 private:
  PreparedExample() = default;

  GapExample source_;
  std::u32string text_;
  std::u32string name_a_;
  std::u32string name_b_;
  PronounGender gender_ = PronounGender::kFeminine;
  NameOccurrences occurrences_;
  Span a_span_;
  Span b_span_;
  Span pronoun_span_;
  SkipReasons static_reasons_;
};

SkipReasons CheckSkipConditions(const PreparedExample& example,
                                const PlaceholderSet& set,
                                const AnonymizerOptions& options = {});
absl::StatusOr<SkipReasons> CheckSkipConditions(
    const GapExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options = {});

// One document under one placeholder set. variant_id 0 is the original;
// set k produces variant_id k + 1.
struct AugmentedVariant {
  std::string id;
  int variant_id = 0;
  bool applied = false;
  SkipReasons skip_reasons;
  std::string text;
  int64_t pronoun_offset = 0;
  int64_t a_offset = 0;
  int64_t b_offset = 0;
  // Mention surfaces at the offsets above.
  std::string pronoun;
  std::string a_name;
  std::string b_name;

  friend bool operator==(const AugmentedVariant&,
                         const AugmentedVariant&) = default;
};

AugmentedVariant OriginalVariant(const GapExample& example);

// Requires CheckSkipConditions(example, set) to be empty. Replaces every
// occurrence of A and B by the gender-selected placeholders and remaps the
// three offsets.
absl::StatusOr<AugmentedVariant> ApplyPlaceholders(
    const PreparedExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options = {});
absl::StatusOr<AugmentedVariant> ApplyPlaceholders(
    const GapExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options = {});

struct TtaExpansion {
  // Original first, then each applied set in set order. Size 1..5.
  std::vector<AugmentedVariant> variants;
  // Sets that were not applied: applied=false, original text and offsets,
  // skip_reasons filled in.
  std::vector<AugmentedVariant> skipped;

  // All five records ordered by variant id.
  std::vector<AugmentedVariant> AllRecords() const;
};

absl::StatusOr<TtaExpansion> ExpandWithTta(
    const GapExample& example, const AnonymizerOptions& options = {});

// Variant dump, one JSON object per line.
nlohmann::json VariantToJson(const AugmentedVariant& variant);
absl::StatusOr<AugmentedVariant> VariantFromJson(const nlohmann::json& j);
absl::StatusOr<std::vector<AugmentedVariant>> ParseVariantsJsonl(
    std::string_view contents);

struct CoverageReport {
  size_t examples = 0;
  // Examples where set k was applied / hit condition 1.
  std::array<size_t, 4> applied_per_set{};
  std::array<size_t, 4> cond1_per_set{};
  // Set-independent conditions; a row may count under several.
  size_t cond2 = 0;
  size_t cond3 = 0;
  size_t cond4 = 0;
  // Examples with all four sets applied / none applied.
  size_t all_sets_applied = 0;
  size_t no_set_applied = 0;

  void Add(const TtaExpansion& expansion);
  // Mean over sets of the applied fraction.
  double MeanAppliedRate() const;
  nlohmann::json ToJson() const;
};

}  // namespace gapanon

#endif  // GAPANON_ANONYMIZER_H_
