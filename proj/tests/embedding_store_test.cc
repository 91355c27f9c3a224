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

#include "gapanon/embedding_store.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "gapanon/corpus.h"
#include "gapanon/utf8.h"
#include "gtest/gtest.h"

namespace gapanon {
namespace {

MentionEmbedding Record(std::string id, int variant, Role role, int dim,
                        float base) {
  MentionEmbedding m{std::move(id), variant, role, dim, {}};
  for (int layer : {-3, -4}) {
    std::vector<float> v(dim);
    for (int i = 0; i < dim; ++i) v[i] = base + 0.1f * i + 0.01f * layer;
    m.layers[layer] = v;
  }
  return m;
}

TEST(EmbeddingStoreTest, AverageOfOneIsIdentity) {
  const std::vector<std::vector<double>> one = {{0.25, -1.5, 3.0}};
  EXPECT_EQ(*AverageSubtokens(one), one[0]);
}

TEST(EmbeddingStoreTest, AverageMatchesElementwiseMean) {
  const std::vector<std::vector<double>> pieces = {
      {1.0, 2.0}, {3.0, -2.0}, {5.0, 0.5}};
  const std::vector<double> mean = *AverageSubtokens(pieces);
  EXPECT_DOUBLE_EQ(mean[0], 3.0);
  EXPECT_DOUBLE_EQ(mean[1], 0.5 / 3.0);
  EXPECT_FALSE(AverageSubtokens({}).ok());
  const std::vector<std::vector<double>> ragged = {{1.0}, {1.0, 2.0}};
  EXPECT_FALSE(AverageSubtokens(ragged).ok());
}

TEST(EmbeddingStoreTest, ConcatFollowsRequestedOrder) {
  const MentionEmbedding m = Record("e", 0, Role::kA, 2, 1.0f);
  const std::vector<int> order = {-4, -3};
  const std::vector<double> v = *ConcatLayers(m, order);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_FLOAT_EQ(static_cast<float>(v[0]), m.layers.at(-4)[0]);
  EXPECT_FLOAT_EQ(static_cast<float>(v[2]), m.layers.at(-3)[0]);
  const std::vector<int> missing = {-6};
  EXPECT_EQ(ConcatLayers(m, missing).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(EmbeddingStoreTest, JsonLineRoundTripsExactly) {
  MentionEmbedding m = Record("id-\xC3\xA9", 3, Role::kPronoun, 5, 0.3f);
  m.layers[-3][1] = std::numeric_limits<float>::denorm_min();
  m.layers[-3][2] = 1.0f / 3.0f;
  absl::StatusOr<MentionEmbedding> back =
      EmbeddingFromJsonLine(EmbeddingToJsonLine(m));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, m);
}

TEST(EmbeddingStoreTest, JsonLineRejectsBadRecords) {
  EXPECT_FALSE(EmbeddingFromJsonLine("{").ok());
  EXPECT_FALSE(EmbeddingFromJsonLine(
                   R"({"example_id":"a","variant":0,"role":"Q","dim":1,)"
                   R"("layers":{"-1":[0.5]}})")
                   .ok());
  EXPECT_FALSE(EmbeddingFromJsonLine(
                   R"({"example_id":"a","variant":0,"role":"A","dim":2,)"
                   R"("layers":{"-1":[0.5]}})")
                   .ok());
}

TEST(EmbeddingStoreTest, StoreRejectsDuplicatesAndDimMismatch) {
  EmbeddingStore store;
  ASSERT_TRUE(store.Insert(Record("a", 0, Role::kA, 3, 0.f)).ok());
  EXPECT_EQ(store.Insert(Record("a", 0, Role::kA, 3, 1.f)).code(),
            absl::StatusCode::kAlreadyExists);
  EXPECT_FALSE(store.Insert(Record("b", 0, Role::kA, 4, 0.f)).ok());
  MentionEmbedding nan = Record("c", 0, Role::kA, 3, 0.f);
  nan.layers[-3][0] = std::nanf("");
  EXPECT_FALSE(store.Insert(nan).ok());
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.dim(), 3);
  EXPECT_TRUE(store.Contains("a", 0, Role::kA));
  EXPECT_EQ(store.Find("a", 1, Role::kA).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(EmbeddingStoreTest, JsonlAndBinaryLoadTheSameRecords) {
  std::vector<MentionEmbedding> records;
  std::string jsonl;
  for (int v = 0; v < 3; ++v) {
    for (Role r : {Role::kA, Role::kB, Role::kPronoun}) {
      records.push_back(
          Record("ex", v, r, 4, static_cast<float>(v) - static_cast<int>(r)));
      jsonl += EmbeddingToJsonLine(records.back()) + "\n";
    }
  }
  absl::StatusOr<EmbeddingStore> from_json = EmbeddingStore::ParseJsonl(jsonl);
  absl::StatusOr<EmbeddingStore> from_binary =
      EmbeddingStore::ParseBinary(EncodeEmbeddingsBinary(records));
  ASSERT_TRUE(from_json.ok()) << from_json.status();
  ASSERT_TRUE(from_binary.ok()) << from_binary.status();
  ASSERT_EQ(from_json->size(), 9u);
  const auto a = from_json->Records();
  const auto b = from_binary->Records();
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);

  const std::string dir = ::testing::TempDir();
  const std::string jpath = dir + "/store.jsonl";
  const std::string bpath = dir + "/store.bin";
  ASSERT_TRUE(WriteStringToFile(jpath, jsonl).ok());
  ASSERT_TRUE(WriteStringToFile(bpath, EncodeEmbeddingsBinary(records)).ok());
  EXPECT_EQ(EmbeddingStore::Load(jpath)->size(), 9u);
  EXPECT_EQ(EmbeddingStore::Load(bpath)->size(), 9u);
  EXPECT_EQ(EmbeddingStore::Load(dir + "/none.bin").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(EmbeddingStoreTest, TruncatedBinaryIsRejected) {
  const std::vector<MentionEmbedding> records = {
      Record("ex", 0, Role::kA, 4, 0.f)};
  const std::string bytes = EncodeEmbeddingsBinary(records);
  EXPECT_FALSE(
      EmbeddingStore::ParseBinary(bytes.substr(0, bytes.size() - 3)).ok());
  EXPECT_FALSE(EmbeddingStore::ParseBinary("GAPEMB00").ok());
}

TEST(EmbeddingStoreTest, StubIsDeterministicBoundedAndSurfaceKeyed) {
  const StubEmbedder stub(16, 9);
  const std::vector<float> a = stub.EmbedSurface(U"Alice", Role::kA, -4);
  EXPECT_EQ(a, stub.EmbedSurface(U"Alice", Role::kA, -4));
  EXPECT_NE(a, stub.EmbedSurface(U"Alice", Role::kA, -3));
  EXPECT_NE(a, stub.EmbedSurface(U"Alice", Role::kB, -4));
  EXPECT_NE(a, stub.EmbedSurface(U"Alicf", Role::kA, -4));
  EXPECT_NE(a, StubEmbedder(16, 10).EmbedSurface(U"Alice", Role::kA, -4));
  for (float x : a) {
    EXPECT_GE(x, -1.0f);
    EXPECT_LE(x, 1.0f);
  }
}

TEST(EmbeddingStoreTest, StubEmbedsTheThreeMentions) {
  AugmentedVariant v;
  v.id = "s1";
  v.variant_id = 2;
  v.text = "Alice met Kate. She left.";
  v.a_offset = 0;
  v.b_offset = 10;
  v.pronoun_offset = 16;
  v.a_name = "Alice";
  v.b_name = "Kate";
  v.pronoun = "She";
  const StubEmbedder stub(8, 1);
  absl::StatusOr<std::array<MentionEmbedding, 3>> e =
      stub.Embed(RequestForVariant(v, {-3, -4}));
  ASSERT_TRUE(e.ok()) << e.status();
  EXPECT_EQ((*e)[0].role, Role::kA);
  EXPECT_EQ((*e)[2].role, Role::kPronoun);
  EXPECT_EQ((*e)[1].variant_id, 2);
  EXPECT_EQ((*e)[1].layers.at(-3), stub.EmbedSurface(U"Kate", Role::kB, -3));
  for (const MentionEmbedding& m : *e) EXPECT_TRUE(ValidateEmbedding(m).ok());
}

}  // namespace
}  // namespace gapanon
