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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "absl/status/status.h"
#include "gapanon/random.h"
#include "gapanon/strings.h"
#include "gapanon/utf8.h"
#include "nlohmann/json.hpp"

namespace gapanon {
namespace {

constexpr std::string_view kBinaryMagic = "GAPEMB01";

uint64_t HashSurface(std::u32string_view surface) {
  // FNV-1a over the scalar values.
  uint64_t h = 0xCBF29CE484222325ull;
  for (const char32_t c : surface) {
    h ^= static_cast<uint64_t>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  bool ReadU32(uint32_t* v) {
    if (data_.size() < 4) return false;
    *v = 0;
    for (int i = 0; i < 4; ++i) {
      *v |= static_cast<uint32_t>(static_cast<unsigned char>(data_[i]))
            << (8 * i);
    }
    data_.remove_prefix(4);
    return true;
  }
  bool ReadBytes(size_t n, std::string_view* out) {
    if (data_.size() < n) return false;
    *out = data_.substr(0, n);
    data_.remove_prefix(n);
    return true;
  }
  bool done() const { return data_.empty(); }

 private:
  std::string_view data_;
};

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kA:
      return "A";
    case Role::kB:
      return "B";
    case Role::kPronoun:
      return "P";
  }
  return "P";
}

absl::StatusOr<Role> ParseRole(std::string_view name) {
  if (name == "A") return Role::kA;
  if (name == "B") return Role::kB;
  if (name == "P") return Role::kPronoun;
  return absl::InvalidArgumentError(str::Cat("unknown role '", name, "'"));
}

absl::Status ValidateEmbedding(const MentionEmbedding& e) {
  if (e.dim <= 0) {
    return absl::InvalidArgumentError(
        str::Cat(e.example_id, ": non-positive dim ", e.dim));
  }
  if (e.variant_id < 0 || e.variant_id > 4) {
    return absl::InvalidArgumentError(
        str::Cat(e.example_id, ": variant ", e.variant_id, " out of range"));
  }
  for (const auto& [layer, values] : e.layers) {
    if (static_cast<int>(values.size()) != e.dim) {
      return absl::InvalidArgumentError(
          str::Cat(e.example_id, ": layer ", layer, " has ", values.size(),
                   " entries, expected dim ", e.dim));
    }
    for (const float v : values) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(str::Cat(
            e.example_id, ": layer ", layer, " has a non-finite entry"));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> AverageSubtokens(
    std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) {
    return absl::InvalidArgumentError("cannot average zero sub-token vectors");
  }
  const size_t dim = vectors.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const std::vector<double>& v : vectors) {
    if (v.size() != dim) {
      return absl::InvalidArgumentError(
          str::Cat("sub-token dimension mismatch: ", v.size(), " vs ", dim));
    }
    for (size_t i = 0; i < dim; ++i) mean[i] += v[i];
  }
  const double n = static_cast<double>(vectors.size());
  for (double& x : mean) x /= n;
  return mean;
}

absl::StatusOr<std::vector<double>> ConcatLayers(
    const MentionEmbedding& embedding, std::span<const int> order) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(embedding.dim) * order.size());
  for (const int layer : order) {
    auto it = embedding.layers.find(layer);
    if (it == embedding.layers.end()) {
      return absl::NotFoundError(
          str::Cat(embedding.example_id, "/", embedding.variant_id, "/",
                   RoleName(embedding.role), ": missing layer ", layer));
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

EmbeddingRequest RequestForVariant(const AugmentedVariant& variant,
                                   std::vector<int> layers) {
  auto span_of = [](int64_t offset, const std::string& surface) {
    absl::StatusOr<size_t> len = Utf8Length(surface);
    return Span{offset, offset + static_cast<int64_t>(len.ok() ? *len : 0)};
  };
  EmbeddingRequest r;
  r.example_id = variant.id;
  r.variant_id = variant.variant_id;
  r.text = variant.text;
  r.a = span_of(variant.a_offset, variant.a_name);
  r.b = span_of(variant.b_offset, variant.b_name);
  r.pronoun = span_of(variant.pronoun_offset, variant.pronoun);
  r.layers = std::move(layers);
  return r;
}

std::vector<float> StubEmbedder::EmbedSurface(std::u32string_view surface,
                                              Role role, int layer) const {
  uint64_t seed = MixSeed(seed_, HashSurface(surface));
  seed = MixSeed(seed, static_cast<uint64_t>(role));
  seed = MixSeed(seed, static_cast<uint64_t>(static_cast<int64_t>(layer)));
  Rng rng(seed);
  std::vector<float> v(static_cast<size_t>(dim_));
  for (float& x : v) x = static_cast<float>(rng.Uniform(-1.0, 1.0));
  return v;
}

absl::StatusOr<std::array<MentionEmbedding, 3>> StubEmbedder::Embed(
    const EmbeddingRequest& request) const {
  absl::StatusOr<std::u32string> text = DecodeUtf8(request.text);
  if (!text.ok()) return text.status();
  const std::array<std::pair<Role, Span>, 3> spans = {
      {{Role::kA, request.a},
       {Role::kB, request.b},
       {Role::kPronoun, request.pronoun}}};
  std::array<MentionEmbedding, 3> out;
  for (size_t i = 0; i < spans.size(); ++i) {
    const auto [role, span] = spans[i];
    if (span.begin < 0 || span.end < span.begin ||
        static_cast<size_t>(span.end) > text->size()) {
      return absl::InvalidArgumentError(str::Cat(
          request.example_id, ": ", RoleName(role), " span out of range"));
    }
    const std::u32string_view surface =
        std::u32string_view(*text).substr(span.begin, span.size());
    MentionEmbedding& e = out[i];
    e.example_id = request.example_id;
    e.variant_id = request.variant_id;
    e.role = role;
    e.dim = dim_;
    for (const int layer : request.layers) {
      e.layers[layer] = EmbedSurface(surface, role, layer);
    }
  }
  return out;
}

std::string EmbeddingToJsonLine(const MentionEmbedding& e) {
  std::string out =
      str::Cat("{\"example_id\":", nlohmann::json(e.example_id).dump(),
               ",\"variant\":", e.variant_id, ",\"role\":\"", RoleName(e.role),
               "\",\"dim\":", e.dim, ",\"layers\":{");
  bool first_layer = true;
  for (const auto& [layer, values] : e.layers) {
    str::Append(&out, first_layer ? "" : ",", "\"", layer, "\":[");
    first_layer = false;
    for (size_t i = 0; i < values.size(); ++i) {
      str::Append(&out, i == 0 ? "" : ",",
                  fmt::sprintf("%.9g", static_cast<double>(values[i])));
    }
    out += "]";
  }
  out += "}}";
  return out;
}

absl::StatusOr<MentionEmbedding> EmbeddingFromJsonLine(std::string_view line) {
  const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("invalid JSON");
  MentionEmbedding e;
  try {
    e.example_id = j.at("example_id").get<std::string>();
    e.variant_id = j.at("variant").get<int>();
    absl::StatusOr<Role> role = ParseRole(j.at("role").get<std::string>());
    if (!role.ok()) return role.status();
    e.role = *role;
    e.dim = j.at("dim").get<int>();
    for (const auto& [name, values] : j.at("layers").items()) {
      int layer;
      if (!str::ParseInt(name, &layer)) {
        return absl::InvalidArgumentError(
            str::Cat("layer key '", name, "' is not an integer"));
      }
      std::vector<float> v;
      v.reserve(values.size());
      for (const auto& x : values) {
        if (!x.is_number()) {
          return absl::InvalidArgumentError(
              str::Cat("layer ", name, " has a non-numeric entry"));
        }
        v.push_back(static_cast<float>(x.get<double>()));
      }
      e.layers[layer] = std::move(v);
    }
  } catch (const nlohmann::json::exception& ex) {
    return absl::InvalidArgumentError(
        str::Cat("malformed embedding record: ", ex.what()));
  }
  if (absl::Status s = ValidateEmbedding(e); !s.ok()) return s;
  return e;
}

std::string EncodeEmbeddingsBinary(std::span<const MentionEmbedding> records) {
  std::string out(kBinaryMagic);
  for (const MentionEmbedding& e : records) {
    std::string rec;
    PutU32(&rec, static_cast<uint32_t>(e.example_id.size()));
    rec += e.example_id;
    PutU32(&rec, static_cast<uint32_t>(e.variant_id));
    PutU32(&rec, static_cast<uint32_t>(e.role));
    PutU32(&rec, static_cast<uint32_t>(e.dim));
    PutU32(&rec, static_cast<uint32_t>(e.layers.size()));
    for (const auto& [layer, values] : e.layers) {
      PutU32(&rec, static_cast<uint32_t>(static_cast<int32_t>(layer)));
      for (const float v : values) {
        uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        PutU32(&rec, bits);
      }
    }
    PutU32(&out, static_cast<uint32_t>(rec.size()));
    out += rec;
  }
  return out;
}

absl::Status EmbeddingStore::Insert(MentionEmbedding embedding) {
  if (absl::Status s = ValidateEmbedding(embedding); !s.ok()) return s;
  if (dim_ != 0 && embedding.dim != dim_) {
    return absl::InvalidArgumentError(
        str::Cat(embedding.example_id, ": dim ", embedding.dim,
                 " differs from store dim ", dim_));
  }
  Key key{embedding.example_id, embedding.variant_id,
          static_cast<int>(embedding.role)};
  if (records_.contains(key)) {
    return absl::AlreadyExistsError(
        str::Cat("duplicate embedding for ", embedding.example_id, " variant ",
                 embedding.variant_id, " role ", RoleName(embedding.role)));
  }
  dim_ = embedding.dim;
  records_.emplace(std::move(key), std::move(embedding));
  return absl::OkStatus();
}

absl::StatusOr<const MentionEmbedding*> EmbeddingStore::Find(
    std::string_view example_id, int variant_id, Role role) const {
  auto it = records_.find(
      Key{std::string(example_id), variant_id, static_cast<int>(role)});
  if (it == records_.end()) {
    return absl::NotFoundError(str::Cat("no embedding for ", example_id,
                                        " variant ", variant_id, " role ",
                                        RoleName(role)));
  }
  return &it->second;
}

bool EmbeddingStore::Contains(std::string_view example_id, int variant_id,
                              Role role) const {
  return records_.contains(
      Key{std::string(example_id), variant_id, static_cast<int>(role)});
}

std::vector<const MentionEmbedding*> EmbeddingStore::Records() const {
  std::vector<const MentionEmbedding*> out;
  out.reserve(records_.size());
  for (const auto& [key, value] : records_) out.push_back(&value);
  std::sort(out.begin(), out.end(),
            [](const MentionEmbedding* x, const MentionEmbedding* y) {
              return std::tie(x->example_id, x->variant_id, x->role) <
                     std::tie(y->example_id, y->variant_id, y->role);
            });
  return out;
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::ParseJsonl(
    std::string_view contents) {
  EmbeddingStore store;
  size_t line_no = 0;
  for (std::string_view line : str::Split(contents, '\n')) {
    ++line_no;
    if (str::Strip(line).empty()) continue;
    absl::StatusOr<MentionEmbedding> e = EmbeddingFromJsonLine(line);
    if (!e.ok()) {
      return absl::InvalidArgumentError(
          str::Cat("embeddings line ", line_no, ": ", e.status().message()));
    }
    if (absl::Status s = store.Insert(*std::move(e)); !s.ok()) {
      return absl::Status(
          s.code(), str::Cat("embeddings line ", line_no, ": ", s.message()));
    }
  }
  return store;
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::ParseBinary(
    std::string_view contents) {
  if (!str::ConsumePrefix(&contents, kBinaryMagic)) {
    return absl::InvalidArgumentError("missing GAPEMB01 magic");
  }
  EmbeddingStore store;
  ByteReader reader(contents);
  size_t index = 0;
  const auto truncated = [&] {
    return absl::InvalidArgumentError(
        str::Cat("truncated binary embedding record ", index));
  };
  while (!reader.done()) {
    uint32_t length;
    std::string_view payload;
    if (!reader.ReadU32(&length) || !reader.ReadBytes(length, &payload)) {
      return truncated();
    }
    ByteReader rec(payload);
    MentionEmbedding e;
    uint32_t id_len, variant, role, dim, num_layers;
    std::string_view id;
    if (!rec.ReadU32(&id_len) || !rec.ReadBytes(id_len, &id) ||
        !rec.ReadU32(&variant) || !rec.ReadU32(&role) || !rec.ReadU32(&dim) ||
        !rec.ReadU32(&num_layers) || role > 2) {
      return truncated();
    }
    e.example_id = std::string(id);
    e.variant_id = static_cast<int>(variant);
    e.role = static_cast<Role>(role);
    e.dim = static_cast<int>(dim);
    for (uint32_t l = 0; l < num_layers; ++l) {
      uint32_t layer;
      if (!rec.ReadU32(&layer)) return truncated();
      std::vector<float> values(dim);
      for (float& v : values) {
        uint32_t bits;
        if (!rec.ReadU32(&bits)) return truncated();
        std::memcpy(&v, &bits, sizeof v);
      }
      e.layers[static_cast<int32_t>(layer)] = std::move(values);
    }
    if (!rec.done()) return truncated();
    if (absl::Status s = store.Insert(std::move(e)); !s.ok()) return s;
    ++index;
  }
  return store;
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::Load(const std::string& path) {
  absl::StatusOr<std::string> contents = ReadFileToString(path);
  if (!contents.ok()) return contents.status();
  absl::StatusOr<EmbeddingStore> store = contents->starts_with(kBinaryMagic)
                                             ? ParseBinary(*contents)
                                             : ParseJsonl(*contents);
  if (!store.ok()) {
    return absl::Status(store.status().code(),
                        str::Cat(path, ": ", store.status().message()));
  }
  return store;
}

}  // namespace gapanon
