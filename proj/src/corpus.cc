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

#include "gapanon/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "gapanon/random.h"
#include "gapanon/strings.h"
#include "gapanon/utf8.h"

namespace gapanon {
namespace {

constexpr std::string_view kColumns[] = {
    "ID",      "Text", "Pronoun",  "Pronoun-offset", "A",  "A-offset",
    "A-coref", "B",    "B-offset", "B-coref",        "URL"};

enum Column {
  kId = 0,
  kText,
  kPronoun,
  kPronounOffset,
  kA,
  kAOffset,
  kACoref,
  kB,
  kBOffset,
  kBCoref,
  kUrl,
  kNumColumns
};

std::vector<std::string_view> SplitLines(std::string_view contents) {
  std::vector<std::string_view> lines = str::Split(contents, '\n');
  for (std::string_view& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  // A trailing newline produces one empty final element.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

absl::StatusOr<bool> ParseBool(std::string_view value) {
  const std::string lower = str::Lower(value);
  if (lower == "true") return true;
  if (lower == "false") return false;
  return absl::InvalidArgumentError(
      str::Cat("expected TRUE or FALSE, got '", value, "'"));
}

absl::Status CheckMention(const std::u32string& text, std::string_view id,
                          std::string_view field, std::string_view value,
                          int64_t offset) {
  absl::StatusOr<std::u32string> mention = DecodeUtf8(value);
  if (!mention.ok()) {
    return absl::InvalidArgumentError(
        str::Cat(id, ": field ", field, ": ", mention.status().message()));
  }
  if (mention->empty()) {
    return absl::InvalidArgumentError(
        str::Cat(id, ": field ", field, " is empty"));
  }
  if (offset < 0 ||
      static_cast<size_t>(offset) + mention->size() > text.size()) {
    return absl::InvalidArgumentError(
        str::Cat(id, ": field ", field, " offset ", offset,
                 " out of range for text of length ", text.size()));
  }
  if (text.compare(static_cast<size_t>(offset), mention->size(), *mention) !=
      0) {
    return absl::InvalidArgumentError(str::Cat(
        id, ": field ", field, " '", value, "' not found at offset ", offset,
        " (found '",
        EncodeUtf8(text.substr(static_cast<size_t>(offset), mention->size())),
        "')"));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kA:
      return "A";
    case Label::kB:
      return "B";
    case Label::kNeither:
      return "NEITHER";
  }
  return "NEITHER";
}

absl::StatusOr<Label> ParseLabel(std::string_view name) {
  const std::string upper = str::Upper(str::Strip(name));
  if (upper == "A") return Label::kA;
  if (upper == "B") return Label::kB;
  if (upper == "NEITHER") return Label::kNeither;
  return absl::InvalidArgumentError(
      str::Cat("unknown label '", name, "' (expected A, B or NEITHER)"));
}

absl::Status ValidateExample(const GapExample& example) {
  absl::StatusOr<std::u32string> text = DecodeUtf8(example.text);
  if (!text.ok()) {
    return absl::InvalidArgumentError(
        str::Cat(example.id, ": field Text: ", text.status().message()));
  }
  if (absl::Status s = CheckMention(*text, example.id, "Pronoun",
                                    example.pronoun, example.pronoun_offset);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckMention(*text, example.id, "A", example.name_a,
                                    example.a_offset);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckMention(*text, example.id, "B", example.name_b,
                                    example.b_offset);
      !s.ok()) {
    return s;
  }
  if (example.a_coref && example.b_coref) {
    return absl::InvalidArgumentError(
        str::Cat(example.id, ": fields A-coref and B-coref are both TRUE"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<GapExample>> ParseGapTsv(std::string_view contents) {
  const std::vector<std::string_view> lines = SplitLines(contents);
  if (lines.empty()) {
    return absl::InvalidArgumentError("line 1: missing header row");
  }
  // Header name -> column position.
  std::vector<int> position(kNumColumns, -1);
  const std::vector<std::string_view> header = str::Split(lines[0], '\t');
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string_view name = str::Strip(header[i]);
    for (int c = 0; c < kNumColumns; ++c) {
      if (name == kColumns[c]) position[c] = static_cast<int>(i);
    }
  }
  for (int c : {kId, kText, kPronoun, kPronounOffset, kA, kAOffset, kB,
                kBOffset, kUrl}) {
    if (position[c] < 0) {
      return absl::InvalidArgumentError(
          str::Cat("line 1: header is missing column ", kColumns[c]));
    }
  }
  const bool labeled = position[kACoref] >= 0 && position[kBCoref] >= 0;
  if ((position[kACoref] >= 0) != (position[kBCoref] >= 0)) {
    return absl::InvalidArgumentError(
        "line 1: header has only one of A-coref / B-coref");
  }

  std::vector<GapExample> examples;
  examples.reserve(lines.size() - 1);
  for (size_t line_no = 1; line_no < lines.size(); ++line_no) {
    const std::string_view line = lines[line_no];
    const size_t human_line = line_no + 1;
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = str::Split(line, '\t');
    if (fields.size() != header.size()) {
      return absl::InvalidArgumentError(
          str::Cat("line ", human_line, ": expected ", header.size(),
                   " columns, found ", fields.size()));
    }
    auto field = [&](Column c) { return fields[position[c]]; };
    auto offset = [&](Column c) -> absl::StatusOr<int64_t> {
      int64_t value;
      if (!str::ParseInt(field(c), &value)) {
        return absl::InvalidArgumentError(
            str::Cat("line ", human_line, ": column ", kColumns[c],
                     " is not an integer: '", field(c), "'"));
      }
      return value;
    };

    GapExample ex;
    ex.id = std::string(field(kId));
    ex.text = std::string(field(kText));
    ex.pronoun = std::string(field(kPronoun));
    ex.name_a = std::string(field(kA));
    ex.name_b = std::string(field(kB));
    ex.url = std::string(field(kUrl));
    ex.labeled = labeled;
    for (auto [column, target] : {std::pair{kPronounOffset, &ex.pronoun_offset},
                                  std::pair{kAOffset, &ex.a_offset},
                                  std::pair{kBOffset, &ex.b_offset}}) {
      absl::StatusOr<int64_t> value = offset(column);
      if (!value.ok()) return value.status();
      *target = *value;
    }
    if (labeled) {
      for (auto [column, target] :
           {std::pair{kACoref, &ex.a_coref}, std::pair{kBCoref, &ex.b_coref}}) {
        absl::StatusOr<bool> value = ParseBool(field(column));
        if (!value.ok()) {
          return absl::InvalidArgumentError(
              str::Cat("line ", human_line, ": column ", kColumns[column], ": ",
                       value.status().message()));
        }
        *target = *value;
      }
    }
    if (absl::Status s = ValidateExample(ex); !s.ok()) {
      return absl::InvalidArgumentError(
          str::Cat("line ", human_line, ": ", s.message()));
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

absl::StatusOr<std::string> ReadFileToString(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(str::Cat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteStringToFile(const std::string& path,
                               std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(str::Cat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(str::Cat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<GapExample>> ReadGapTsvFile(
    const std::string& path) {
  absl::StatusOr<std::string> contents = ReadFileToString(path);
  if (!contents.ok()) return contents.status();
  absl::StatusOr<std::vector<GapExample>> examples = ParseGapTsv(*contents);
  if (!examples.ok()) {
    return absl::Status(examples.status().code(),
                        str::Cat(path, ": ", examples.status().message()));
  }
  return examples;
}

absl::StatusOr<std::vector<GapExample>> ReadGapTsvFiles(
    std::span<const std::string> paths) {
  std::vector<GapExample> all;
  for (const std::string& path : paths) {
    absl::StatusOr<std::vector<GapExample>> part = ReadGapTsvFile(path);
    if (!part.ok()) return part.status();
    std::move(part->begin(), part->end(), std::back_inserter(all));
  }
  return all;
}

std::string SerializeGapTsv(std::span<const GapExample> examples) {
  const bool labeled =
      std::any_of(examples.begin(), examples.end(),
                  [](const GapExample& e) { return e.labeled; });
  std::string out;
  if (labeled) {
    str::Append(&out, str::Join(kColumns, "\t"), "\n");
  } else {
    str::Append(&out,
                "ID\tText\tPronoun\tPronoun-offset\tA\tA-offset\tB\t"
                "B-offset\tURL\n");
  }
  auto flag = [](bool b) { return b ? "TRUE" : "FALSE"; };
  for (const GapExample& e : examples) {
    if (labeled) {
      str::Append(&out, e.id, "\t", e.text, "\t", e.pronoun, "\t",
                  e.pronoun_offset, "\t", e.name_a, "\t", e.a_offset, "\t",
                  flag(e.a_coref), "\t", e.name_b, "\t", e.b_offset, "\t",
                  flag(e.b_coref), "\t", e.url, "\n");
    } else {
      str::Append(&out, e.id, "\t", e.text, "\t", e.pronoun, "\t",
                  e.pronoun_offset, "\t", e.name_a, "\t", e.a_offset, "\t",
                  e.name_b, "\t", e.b_offset, "\t", e.url, "\n");
    }
  }
  return out;
}

absl::StatusOr<std::vector<LabelCorrection>> ParseCorrectionsTsv(
    std::string_view contents) {
  std::vector<LabelCorrection> corrections;
  const std::vector<std::string_view> lines = SplitLines(contents);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = str::Strip(lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = str::Split(line, '\t');
    if (fields.size() != 2) {
      return absl::InvalidArgumentError(str::Cat("corrections line ", i + 1,
                                                 ": expected 2 columns, found ",
                                                 fields.size()));
    }
    if (i == 0 && str::Lower(fields[0]) == "id") continue;
    absl::StatusOr<Label> label = ParseLabel(fields[1]);
    if (!label.ok()) {
      return absl::InvalidArgumentError(
          str::Cat("corrections line ", i + 1, ": ", label.status().message()));
    }
    corrections.push_back({std::string(str::Strip(fields[0])), *label});
  }
  return corrections;
}

absl::StatusOr<std::vector<LabelCorrection>> ReadCorrectionsFile(
    const std::string& path) {
  absl::StatusOr<std::string> contents = ReadFileToString(path);
  if (!contents.ok()) return contents.status();
  return ParseCorrectionsTsv(*contents);
}

absl::StatusOr<std::vector<GapExample>> ApplyCorrections(
    std::vector<GapExample> examples,
    std::span<const LabelCorrection> corrections) {
  absl::flat_hash_map<std::string_view, size_t> by_id;
  for (size_t i = 0; i < examples.size(); ++i) by_id[examples[i].id] = i;
  std::vector<std::string> unmatched;
  for (const LabelCorrection& c : corrections) {
    if (!by_id.contains(c.id)) unmatched.push_back(c.id);
  }
  if (!unmatched.empty()) {
    return absl::NotFoundError(str::Cat("corrections reference unknown ids: ",
                                        str::Join(unmatched, ", ")));
  }
  for (const LabelCorrection& c : corrections) {
    examples[by_id.at(c.id)].set_label(c.corrected_label);
  }
  return examples;
}

absl::StatusOr<std::vector<std::vector<size_t>>> SplitFolds(size_t n, int k,
                                                            uint64_t seed) {
  if (k < 2 || static_cast<size_t>(k) > n) {
    return absl::InvalidArgumentError(
        str::Cat("fold count ", k, " out of range [2, ", n, "]"));
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  std::vector<std::vector<size_t>> folds(k);
  for (size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

nlohmann::json FoldsToJson(const std::vector<std::vector<size_t>>& folds,
                           std::span<const GapExample> examples) {
  nlohmann::json out = nlohmann::json::object();
  for (size_t f = 0; f < folds.size(); ++f) {
    nlohmann::json ids = nlohmann::json::array();
    for (size_t index : folds[f]) ids.push_back(examples[index].id);
    out[std::to_string(f)] = std::move(ids);
  }
  return out;
}

absl::StatusOr<std::vector<size_t>> SampleSubset(size_t n, size_t count,
                                                 uint64_t seed) {
  if (count > n) {
    return absl::InvalidArgumentError(
        str::Cat("cannot sample ", count, " of ", n, " rows"));
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace gapanon
