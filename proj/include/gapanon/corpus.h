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

#ifndef GAPANON_CORPUS_H_
#define GAPANON_CORPUS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace gapanon {

enum class Label { kA = 0, kB = 1, kNeither = 2 };

// "A", "B", "NEITHER".
std::string_view LabelName(Label label);
// Case-insensitive inverse of LabelName.
absl::StatusOr<Label> ParseLabel(std::string_view name);

// One row of a GAP-format corpus. All offsets count Unicode scalar values
// into `text`.
struct GapExample {
  std::string id;
  std::string text;
  std::string pronoun;
  int64_t pronoun_offset = 0;
  std::string name_a;
  int64_t a_offset = 0;
  bool a_coref = false;
  std::string name_b;
  int64_t b_offset = 0;
  bool b_coref = false;
  std::string url;
  // False for unlabeled test files (no A-coref / B-coref columns).
  bool labeled = true;

  Label label() const {
    if (a_coref) return Label::kA;
    if (b_coref) return Label::kB;
    return Label::kNeither;
  }
  void set_label(Label label) {
    a_coref = label == Label::kA;
    b_coref = label == Label::kB;
  }

  friend bool operator==(const GapExample&, const GapExample&) = default;
};

struct LabelCorrection {
  std::string id;
  Label corrected_label = Label::kNeither;
};

// Checks offsets, mention substrings and the label encoding. The error
// message names the example id and the offending field.
absl::Status ValidateExample(const GapExample& example);

// Parses a GAP TSV with a header row. Columns are located by header name, so
// both the labeled 11-column layout and the unlabeled 9-column layout are
// accepted.
absl::StatusOr<std::vector<GapExample>> ParseGapTsv(std::string_view contents);
absl::StatusOr<std::vector<GapExample>> ReadGapTsvFile(const std::string& path);
// Reads and concatenates several corpus files in order.
absl::StatusOr<std::vector<GapExample>> ReadGapTsvFiles(
    std::span<const std::string> paths);

// Writes the 11-column labeled layout (9 columns if no example is labeled).
std::string SerializeGapTsv(std::span<const GapExample> examples);

// Two-column TSV: id <TAB> label, label in {A, B, NEITHER}. A header row
// "ID<TAB>Label" is optional.
absl::StatusOr<std::vector<LabelCorrection>> ParseCorrectionsTsv(
    std::string_view contents);
absl::StatusOr<std::vector<LabelCorrection>> ReadCorrectionsFile(
    const std::string& path);

// Fails, listing every unmatched id, if any correction does not resolve.
absl::StatusOr<std::vector<GapExample>> ApplyCorrections(
    std::vector<GapExample> examples,
    std::span<const LabelCorrection> corrections);

// Seeded shuffle of [0, n) dealt round-robin into k folds. Each fold is
// returned sorted ascending.
absl::StatusOr<std::vector<std::vector<size_t>>> SplitFolds(size_t n, int k,
                                                            uint64_t seed);

// {"0": [ids...], "1": [ids...], ...}
nlohmann::json FoldsToJson(const std::vector<std::vector<size_t>>& folds,
                           std::span<const GapExample> examples);

// `count` distinct indices from [0, n), chosen by seeded shuffle and sorted.
absl::StatusOr<std::vector<size_t>> SampleSubset(size_t n, size_t count,
                                                 uint64_t seed);

absl::StatusOr<std::string> ReadFileToString(const std::string& path);
absl::Status WriteStringToFile(const std::string& path,
                               std::string_view contents);

}  // namespace gapanon

#endif  // GAPANON_CORPUS_H_
