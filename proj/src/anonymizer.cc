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

#include "gapanon/anonymizer.h"

#include <algorithm>

#include "absl/status/status.h"
#include "gapanon/strings.h"
#include "gapanon/utf8.h"

namespace gapanon {
namespace {

constexpr std::string_view kReasonNames[] = {"Cond1", "Cond2", "Cond3",
                                             "Cond4"};

bool IsApostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

// Word character at position i, where joiners only count when they sit
// between two letters or digits.
bool WordCharAt(std::u32string_view text, size_t i) {
  const char32_t c = text[i];
  if (IsLetterOrDigit(c)) return true;
  if (!IsWordJoiner(c)) return false;
  return i > 0 && i + 1 < text.size() && IsLetterOrDigit(text[i - 1]) &&
         IsLetterOrDigit(text[i + 1]);
}

bool RightBoundary(std::u32string_view text, size_t end) {
  if (end >= text.size() || !WordCharAt(text, end)) return true;
  // Possessive: Name's / Name’s.
  if (IsApostrophe(text[end]) && end + 1 < text.size() &&
      text[end + 1] == U's') {
    return end + 2 >= text.size() || !WordCharAt(text, end + 2);
  }
  return false;
}

std::vector<std::u32string_view> SplitWords(std::u32string_view name) {
  std::vector<std::u32string_view> words;
  size_t i = 0;
  while (i < name.size()) {
    while (i < name.size() && IsSpace(name[i])) ++i;
    const size_t start = i;
    while (i < name.size() && !IsSpace(name[i])) ++i;
    if (i > start) words.push_back(name.substr(start, i - start));
  }
  return words;
}

std::vector<NameOccurrence> OccurrencesOf(std::u32string_view text,
                                          std::u32string_view name,
                                          std::span<const Span> all_full) {
  std::vector<NameOccurrence> out;
  for (const Span& s : FindWholeWord(text, name)) {
    out.push_back({s, OccurrenceKind::kFull});
  }
  const std::vector<std::u32string_view> words = SplitWords(name);
  if (words.size() == 2) {
    auto add_lone = [&](std::u32string_view word, OccurrenceKind kind) {
      for (const Span& s : FindWholeWord(text, word)) {
        const bool inside_full =
            std::any_of(all_full.begin(), all_full.end(),
                        [&](const Span& f) { return f.Overlaps(s); });
        const bool duplicate =
            std::any_of(out.begin(), out.end(),
                        [&](const NameOccurrence& o) { return o.span == s; });
        if (!inside_full && !duplicate) out.push_back({s, kind});
      }
    };
    add_lone(words[0], OccurrenceKind::kLoneFirst);
    add_lone(words[1], OccurrenceKind::kLoneLast);
  }
  std::sort(out.begin(), out.end(),
            [](const NameOccurrence& x, const NameOccurrence& y) {
              return x.span < y.span;
            });
  return out;
}

std::u32string MustDecode(std::string_view s) {
  absl::StatusOr<std::u32string> d = DecodeUtf8(s);
  return d.ok() ? *std::move(d) : std::u32string();
}

bool ContainsWord(std::u32string_view text, std::string_view word) {
  return !FindWholeWord(text, MustDecode(word)).empty();
}

}  // namespace

PronounGender PronounGenderOf(std::string_view pronoun) {
  const std::string lower = str::Lower(str::Strip(pronoun));
  if (lower == "he" || lower == "him" || lower == "his") {
    return PronounGender::kMasculine;
  }
  return PronounGender::kFeminine;
}

const std::array<PlaceholderSet, 4>& DefaultPlaceholderSets() {
  static const std::array<PlaceholderSet, 4> kSets = {{
      {0, {"Alice", "Kate"}, {"John", "Michael"}},
      {1, {"Elizabeth", "Mary"}, {"James", "Henry"}},
      {2, {"Kate", "Elizabeth"}, {"Michael", "James"}},
      {3, {"Mary", "Alice"}, {"Henry", "John"}},
  }};
  return kSets;
}

std::vector<std::string> SkipReasons::Names() const {
  std::vector<std::string> names;
  for (int i = 0; i < 4; ++i) {
    if (bits_ & (1u << i)) names.emplace_back(kReasonNames[i]);
  }
  return names;
}

absl::StatusOr<SkipReasons> SkipReasons::FromNames(
    std::span<const std::string> names) {
  SkipReasons reasons;
  for (const std::string& name : names) {
    const auto* it =
        std::find(std::begin(kReasonNames), std::end(kReasonNames), name);
    if (it == std::end(kReasonNames)) {
      return absl::InvalidArgumentError(
          str::Cat("unknown skip reason '", name, "'"));
    }
    reasons.bits_ |=
        static_cast<uint8_t>(1u << (it - std::begin(kReasonNames)));
  }
  return reasons;
}

std::vector<Span> FindWholeWord(std::u32string_view text,
                                std::u32string_view word) {
  std::vector<Span> spans;
  if (word.empty()) return spans;
  size_t pos = text.find(word);
  while (pos != std::u32string_view::npos) {
    const size_t end = pos + word.size();
    const bool left_ok = pos == 0 || !WordCharAt(text, pos - 1);
    if (left_ok && RightBoundary(text, end)) {
      spans.push_back({static_cast<int64_t>(pos), static_cast<int64_t>(end)});
      pos = text.find(word, end);
    } else {
      pos = text.find(word, pos + 1);
    }
  }
  return spans;
}

int WordCount(std::u32string_view name) {
  return static_cast<int>(SplitWords(name).size());
}

NameOccurrences FindNameOccurrences(std::u32string_view text,
                                    std::u32string_view name_a,
                                    std::u32string_view name_b) {
  std::vector<Span> full = FindWholeWord(text, name_a);
  for (const Span& s : FindWholeWord(text, name_b)) full.push_back(s);
  NameOccurrences result;
  result.a = OccurrencesOf(text, name_a, full);
  result.b = OccurrencesOf(text, name_b, full);
  return result;
}

absl::StatusOr<NameOccurrences> FindNameOccurrences(std::string_view text,
                                                    std::string_view name_a,
                                                    std::string_view name_b) {
  absl::StatusOr<std::u32string> t = DecodeUtf8(text);
  if (!t.ok()) return t.status();
  absl::StatusOr<std::u32string> a = DecodeUtf8(name_a);
  if (!a.ok()) return a.status();
  absl::StatusOr<std::u32string> b = DecodeUtf8(name_b);
  if (!b.ok()) return b.status();
  return FindNameOccurrences(*t, *a, *b);
}

absl::StatusOr<PreparedExample> PreparedExample::Create(
    const GapExample& example) {
  if (absl::Status s = ValidateExample(example); !s.ok()) return s;
  PreparedExample p;
  p.source_ = example;
  p.text_ = MustDecode(example.text);
  p.name_a_ = MustDecode(example.name_a);
  p.name_b_ = MustDecode(example.name_b);
  p.gender_ = PronounGenderOf(example.pronoun);
  p.a_span_ = {example.a_offset,
               example.a_offset + static_cast<int64_t>(p.name_a_.size())};
  p.b_span_ = {example.b_offset,
               example.b_offset + static_cast<int64_t>(p.name_b_.size())};
  p.pronoun_span_ = {
      example.pronoun_offset,
      example.pronoun_offset +
          static_cast<int64_t>(MustDecode(example.pronoun).size())};
  p.occurrences_ = FindNameOccurrences(p.text_, p.name_a_, p.name_b_);

  // Labeled spans are replaced even when tagging noise makes them fail the
  // whole-word scan.
  auto ensure_labeled = [](std::vector<NameOccurrence>& occ, Span labeled) {
    const bool present =
        std::any_of(occ.begin(), occ.end(), [&](const NameOccurrence& o) {
          return o.span == labeled && o.kind == OccurrenceKind::kFull;
        });
    if (!present) {
      occ.push_back({labeled, OccurrenceKind::kFull});
      std::sort(occ.begin(), occ.end(),
                [](const NameOccurrence& x, const NameOccurrence& y) {
                  return x.span < y.span;
                });
    }
  };
  ensure_labeled(p.occurrences_.a, p.a_span_);
  ensure_labeled(p.occurrences_.b, p.b_span_);

  const int words_a = WordCount(p.name_a_);
  const int words_b = WordCount(p.name_b_);
  auto has_lone = [](const std::vector<NameOccurrence>& occ) {
    return std::any_of(occ.begin(), occ.end(), [](const NameOccurrence& o) {
      return o.kind != OccurrenceKind::kFull;
    });
  };
  if ((words_a == 2 && has_lone(p.occurrences_.a)) ||
      (words_b == 2 && has_lone(p.occurrences_.b))) {
    p.static_reasons_.Add(SkipReason::kCond2);
  }
  if (words_a > 2 || words_b > 2) p.static_reasons_.Add(SkipReason::kCond3);

  bool cond4 = p.name_a_.find(p.name_b_) != std::u32string::npos ||
               p.name_b_.find(p.name_a_) != std::u32string::npos;
  // Overlapping mentions are tagging noise; treated like condition 4.
  for (const NameOccurrence& a : p.occurrences_.a) {
    for (const NameOccurrence& b : p.occurrences_.b) {
      cond4 = cond4 || a.span.Overlaps(b.span);
    }
  }
  for (const auto* occ : {&p.occurrences_.a, &p.occurrences_.b}) {
    for (const NameOccurrence& o : *occ) {
      cond4 = cond4 || o.span.Overlaps(p.pronoun_span_);
    }
  }
  if (cond4) p.static_reasons_.Add(SkipReason::kCond4);
  return p;
}

SkipReasons CheckSkipConditions(const PreparedExample& example,
                                const PlaceholderSet& set,
                                const AnonymizerOptions& options) {
  SkipReasons reasons = example.static_reasons();
  std::vector<const std::string*> names;
  if (options.cond1_all_names) {
    names = {&set.feminine.for_a, &set.feminine.for_b, &set.masculine.for_a,
             &set.masculine.for_b};
  } else {
    const NamePair& pair = set.ForGender(example.gender());
    names = {&pair.for_a, &pair.for_b};
  }
  for (const std::string* name : names) {
    if (ContainsWord(example.text(), *name)) {
      reasons.Add(SkipReason::kCond1);
      break;
    }
  }
  return reasons;
}

absl::StatusOr<SkipReasons> CheckSkipConditions(
    const GapExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options) {
  absl::StatusOr<PreparedExample> prepared = PreparedExample::Create(example);
  if (!prepared.ok()) return prepared.status();
  return CheckSkipConditions(*prepared, set, options);
}

AugmentedVariant OriginalVariant(const GapExample& example) {
  AugmentedVariant v;
  v.id = example.id;
  v.variant_id = 0;
  v.applied = false;
  v.text = example.text;
  v.pronoun_offset = example.pronoun_offset;
  v.a_offset = example.a_offset;
  v.b_offset = example.b_offset;
  v.pronoun = example.pronoun;
  v.a_name = example.name_a;
  v.b_name = example.name_b;
  return v;
}

absl::StatusOr<AugmentedVariant> ApplyPlaceholders(
    const PreparedExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options) {
  const SkipReasons reasons = CheckSkipConditions(example, set, options);
  if (!reasons.empty()) {
    return absl::FailedPreconditionError(
        str::Cat(example.source().id, ": set ", set.set_id,
                 " is excluded by a skip condition"));
  }
  const NamePair& pair = set.ForGender(example.gender());
  const std::u32string for_a = MustDecode(pair.for_a);
  const std::u32string for_b = MustDecode(pair.for_b);

  struct Replacement {
    Span span;
    const std::u32string* with;
  };
  std::vector<Replacement> replacements;
  for (const NameOccurrence& o : example.occurrences().a) {
    replacements.push_back({o.span, &for_a});
  }
  for (const NameOccurrence& o : example.occurrences().b) {
    replacements.push_back({o.span, &for_b});
  }
  std::sort(replacements.begin(), replacements.end(),
            [](const Replacement& x, const Replacement& y) {
              return x.span < y.span;
            });
  for (size_t i = 1; i < replacements.size(); ++i) {
    if (replacements[i - 1].span.Overlaps(replacements[i].span)) {
      return absl::InvalidArgumentError(
          str::Cat(example.source().id, ": overlapping candidate name spans"));
    }
  }

  const std::u32string& text = example.text();
  std::u32string out;
  out.reserve(text.size());
  int64_t cursor = 0;
  int64_t delta_before_pronoun = 0;
  int64_t new_a = -1;
  int64_t new_b = -1;
  for (const Replacement& r : replacements) {
    out.append(text, cursor, r.span.begin - cursor);
    const int64_t new_start = static_cast<int64_t>(out.size());
    out.append(*r.with);
    cursor = r.span.end;
    if (r.span == example.a_span()) new_a = new_start;
    if (r.span == example.b_span()) new_b = new_start;
    if (r.span.end <= example.pronoun_span().begin) {
      delta_before_pronoun +=
          static_cast<int64_t>(r.with->size()) - r.span.size();
    }
  }
  out.append(text, cursor, std::u32string::npos);

  AugmentedVariant v;
  v.id = example.source().id;
  v.variant_id = set.set_id + 1;
  v.applied = true;
  v.text = EncodeUtf8(out);
  v.pronoun_offset = example.source().pronoun_offset + delta_before_pronoun;
  v.a_offset = new_a;
  v.b_offset = new_b;
  v.pronoun = example.source().pronoun;
  v.a_name = pair.for_a;
  v.b_name = pair.for_b;

  const std::u32string pronoun = MustDecode(v.pronoun);
  auto at = [&](int64_t offset, const std::u32string& s) {
    return offset >= 0 &&
           out.compare(static_cast<size_t>(offset), s.size(), s) == 0;
  };
  if (!at(v.a_offset, for_a) || !at(v.b_offset, for_b) ||
      !at(v.pronoun_offset, pronoun)) {
    return absl::InternalError(str::Cat(
        example.source().id, ": offset remapping failed for set ", set.set_id));
  }
  return v;
}

absl::StatusOr<AugmentedVariant> ApplyPlaceholders(
    const GapExample& example, const PlaceholderSet& set,
    const AnonymizerOptions& options) {
  absl::StatusOr<PreparedExample> prepared = PreparedExample::Create(example);
  if (!prepared.ok()) return prepared.status();
  return ApplyPlaceholders(*prepared, set, options);
}

std::vector<AugmentedVariant> TtaExpansion::AllRecords() const {
  std::vector<AugmentedVariant> all = variants;
  all.insert(all.end(), skipped.begin(), skipped.end());
  std::sort(all.begin(), all.end(),
            [](const AugmentedVariant& x, const AugmentedVariant& y) {
              return x.variant_id < y.variant_id;
            });
  return all;
}

absl::StatusOr<TtaExpansion> ExpandWithTta(const GapExample& example,
                                           const AnonymizerOptions& options) {
  absl::StatusOr<PreparedExample> prepared = PreparedExample::Create(example);
  if (!prepared.ok()) return prepared.status();
  TtaExpansion expansion;
  expansion.variants.push_back(OriginalVariant(example));
  for (const PlaceholderSet& set : DefaultPlaceholderSets()) {
    const SkipReasons reasons = CheckSkipConditions(*prepared, set, options);
    if (reasons.empty()) {
      absl::StatusOr<AugmentedVariant> v =
          ApplyPlaceholders(*prepared, set, options);
      if (!v.ok()) return v.status();
      expansion.variants.push_back(*std::move(v));
    } else {
      AugmentedVariant skipped = OriginalVariant(example);
      skipped.variant_id = set.set_id + 1;
      skipped.skip_reasons = reasons;
      expansion.skipped.push_back(std::move(skipped));
    }
  }
  return expansion;
}

nlohmann::json VariantToJson(const AugmentedVariant& v) {
  return nlohmann::json{{"id", v.id},
                        {"variant", v.variant_id},
                        {"applied", v.applied},
                        {"skip_reasons", v.skip_reasons.Names()},
                        {"text", v.text},
                        {"pronoun_offset", v.pronoun_offset},
                        {"a_offset", v.a_offset},
                        {"b_offset", v.b_offset},
                        {"pronoun", v.pronoun},
                        {"a_name", v.a_name},
                        {"b_name", v.b_name}};
}

absl::StatusOr<AugmentedVariant> VariantFromJson(const nlohmann::json& j) {
  AugmentedVariant v;
  try {
    v.id = j.at("id").get<std::string>();
    v.variant_id = j.at("variant").get<int>();
    v.applied = j.at("applied").get<bool>();
    v.text = j.at("text").get<std::string>();
    v.pronoun_offset = j.at("pronoun_offset").get<int64_t>();
    v.a_offset = j.at("a_offset").get<int64_t>();
    v.b_offset = j.at("b_offset").get<int64_t>();
    v.pronoun = j.at("pronoun").get<std::string>();
    v.a_name = j.at("a_name").get<std::string>();
    v.b_name = j.at("b_name").get<std::string>();
    const auto names = j.at("skip_reasons").get<std::vector<std::string>>();
    absl::StatusOr<SkipReasons> reasons = SkipReasons::FromNames(names);
    if (!reasons.ok()) return reasons.status();
    v.skip_reasons = *reasons;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        str::Cat("malformed variant record: ", e.what()));
  }
  if (v.variant_id < 0 || v.variant_id > 4) {
    return absl::InvalidArgumentError(
        str::Cat(v.id, ": variant id ", v.variant_id, " out of range"));
  }
  return v;
}

absl::StatusOr<std::vector<AugmentedVariant>> ParseVariantsJsonl(
    std::string_view contents) {
  std::vector<AugmentedVariant> out;
  size_t line_no = 0;
  for (std::string_view line : str::Split(contents, '\n')) {
    ++line_no;
    if (str::Strip(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          str::Cat("variants line ", line_no, ": invalid JSON"));
    }
    absl::StatusOr<AugmentedVariant> v = VariantFromJson(j);
    if (!v.ok()) {
      return absl::InvalidArgumentError(
          str::Cat("variants line ", line_no, ": ", v.status().message()));
    }
    out.push_back(*std::move(v));
  }
  return out;
}

void CoverageReport::Add(const TtaExpansion& expansion) {
  ++examples;
  for (const AugmentedVariant& v : expansion.variants) {
    if (v.variant_id > 0) ++applied_per_set[v.variant_id - 1];
  }
  SkipReasons any;
  for (const AugmentedVariant& v : expansion.skipped) {
    if (v.skip_reasons.Has(SkipReason::kCond1)) {
      ++cond1_per_set[v.variant_id - 1];
    }
    for (SkipReason r :
         {SkipReason::kCond2, SkipReason::kCond3, SkipReason::kCond4}) {
      if (v.skip_reasons.Has(r)) any.Add(r);
    }
  }
  if (any.Has(SkipReason::kCond2)) ++cond2;
  if (any.Has(SkipReason::kCond3)) ++cond3;
  if (any.Has(SkipReason::kCond4)) ++cond4;
  if (expansion.variants.size() == 5) ++all_sets_applied;
  if (expansion.variants.size() == 1) ++no_set_applied;
}

double CoverageReport::MeanAppliedRate() const {
  if (examples == 0) return 0.0;
  double sum = 0.0;
  for (size_t n : applied_per_set) sum += static_cast<double>(n);
  return sum / (4.0 * static_cast<double>(examples));
}

nlohmann::json CoverageReport::ToJson() const {
  const double n = examples == 0 ? 1.0 : static_cast<double>(examples);
  nlohmann::json per_set = nlohmann::json::array();
  for (int k = 0; k < 4; ++k) {
    per_set.push_back({{"set", k},
                       {"applied", applied_per_set[k]},
                       {"applied_rate", applied_per_set[k] / n},
                       {"cond1", cond1_per_set[k]},
                       {"cond1_rate", cond1_per_set[k] / n}});
  }
  return nlohmann::json{{"examples", examples},
                        {"per_set", per_set},
                        {"mean_applied_rate", MeanAppliedRate()},
                        {"cond2", cond2},
                        {"cond2_rate", cond2 / n},
                        {"cond3", cond3},
                        {"cond3_rate", cond3 / n},
                        {"cond4", cond4},
                        {"cond4_rate", cond4 / n},
                        {"all_sets_applied", all_sets_applied},
                        {"all_sets_applied_rate", all_sets_applied / n},
                        {"no_set_applied", no_set_applied},
                        {"no_set_applied_rate", no_set_applied / n}};
}

}  // namespace gapanon
