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

#ifndef GAPANON_EMBEDDING_STORE_H_
#define GAPANON_EMBEDDING_STORE_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "gapanon/anonymizer.h"

namespace gapanon {

enum class Role { kA = 0, kB = 1, kPronoun = 2 };

// "A", "B", "P".
std::string_view RoleName(Role role);
absl::StatusOr<Role> ParseRole(std::string_view name);

// One vector per hidden layer for a single mention. Layers are keyed by
// negative offset from the top of the encoder (-1 is the last layer).
struct MentionEmbedding {
  std::string example_id;
  int variant_id = 0;
  Role role = Role::kA;
  int dim = 0;
  std::map<int, std::vector<float>> layers;

  friend bool operator==(const MentionEmbedding&,
                         const MentionEmbedding&) = default;
};

absl::Status ValidateEmbedding(const MentionEmbedding& embedding);

// Mean of the word-piece vectors covering one mention.
absl::StatusOr<std::vector<double>> AverageSubtokens(
    std::span<const std::vector<double>> vectors);

// Layer vectors concatenated in `order`.
absl::StatusOr<std::vector<double>> ConcatLayers(
    const MentionEmbedding& embedding, std::span<const int> order);

struct EmbeddingRequest {
  std::string example_id;
  int variant_id = 0;
  std::string text;
  Span a;
  Span b;
  Span pronoun;
  std::vector<int> layers;
};

EmbeddingRequest RequestForVariant(const AugmentedVariant& variant,
                                   std::vector<int> layers);

// Deterministic stand-in for a transformer. Each vector is a seeded hash of
// (mention surface, role, layer) with entries in [-1, 1], so identical
// surfaces always embed identically.
class StubEmbedder {
 public:
  StubEmbedder(int dim, uint64_t seed) : dim_(dim), seed_(seed) {}

  int dim() const { return dim_; }

  std::vector<float> EmbedSurface(std::u32string_view surface, Role role,
                                  int layer) const;

  // Embeddings for A, B and the pronoun, in that order.
  absl::StatusOr<std::array<MentionEmbedding, 3>> Embed(
      const EmbeddingRequest& request) const;

 private:
  int dim_;
  uint64_t seed_;
};

// JSON Lines record:
// {"example_id": str, "variant": int, "role": "A"|"B"|"P", "dim": int,
//  "layers": {"-3": [f...], ...}}
// Floats are written with 9 significant digits, enough to round-trip any
// float32 exactly.
std::string EmbeddingToJsonLine(const MentionEmbedding& embedding);
absl::StatusOr<MentionEmbedding> EmbeddingFromJsonLine(std::string_view line);

// Bulk sidecar format: magic "GAPEMB01" followed by length-prefixed
// little-endian records.
std::string EncodeEmbeddingsBinary(std::span<const MentionEmbedding> records);

class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Rejects duplicate keys, non-finite entries, and a dim differing from
  // records already present.
  absl::Status Insert(MentionEmbedding embedding);

  absl::StatusOr<const MentionEmbedding*> Find(std::string_view example_id,
                                               int variant_id, Role role) const;
  bool Contains(std::string_view example_id, int variant_id, Role role) const;

  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  // 0 while empty.
  int dim() const { return dim_; }

  static absl::StatusOr<EmbeddingStore> ParseJsonl(std::string_view contents);
  static absl::StatusOr<EmbeddingStore> ParseBinary(std::string_view contents);
  // Chooses the format from the file's leading magic bytes.
  static absl::StatusOr<EmbeddingStore> Load(const std::string& path);

  std::vector<const MentionEmbedding*> Records() const;

 private:
  using Key = std::tuple<std::string, int, int>;
  absl::flat_hash_map<Key, MentionEmbedding> records_;
  int dim_ = 0;
};

}  // namespace gapanon

#endif  // GAPANON_EMBEDDING_STORE_H_
