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

#ifndef GAPANON_STRINGS_H_
#define GAPANON_STRINGS_H_

// String helpers over std::string_view. The system absl build keeps its own
// string_view type, so its string utilities do not accept std::string_view.

#include <charconv>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"
#include "fmt/format.h"
#include "fmt/printf.h"

template <>
struct fmt::formatter<absl::string_view> : fmt::formatter<std::string_view> {
  template <typename Context>
  auto format(absl::string_view s, Context& ctx) const {
    return fmt::formatter<std::string_view>::format(
        std::string_view(s.data(), s.size()), ctx);
  }
};

template <>
struct fmt::formatter<absl::Status> : fmt::formatter<std::string_view> {
  template <typename Context>
  auto format(const absl::Status& s, Context& ctx) const {
    return fmt::formatter<std::string_view>::format(s.ToString(), ctx);
  }
};

namespace gapanon::str {

template <typename... Args>
void Append(std::string* out, const Args&... args) {
  (fmt::format_to(std::back_inserter(*out), "{}", args), ...);
}

template <typename... Args>
std::string Cat(const Args&... args) {
  std::string out;
  Append(&out, args...);
  return out;
}

template <typename Range>
std::string Join(const Range& items, std::string_view sep) {
  return fmt::format("{}", fmt::join(items, sep));
}

inline std::string_view View(absl::string_view s) {
  return {s.data(), s.size()};
}

std::vector<std::string_view> Split(std::string_view text, char sep);
// Splits on runs of ASCII whitespace, dropping empty pieces.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

std::string_view Strip(std::string_view text);
std::string_view StripTrailing(std::string_view text);
std::string Lower(std::string_view text);
std::string Upper(std::string_view text);

bool ConsumePrefix(std::string_view* text, std::string_view prefix);

// Whole-string parses; surrounding ASCII whitespace is ignored.
bool ParseInt(std::string_view text, int64_t* value);
bool ParseInt(std::string_view text, int* value);
bool ParseDouble(std::string_view text, double* value);

}  // namespace gapanon::str

#endif  // GAPANON_STRINGS_H_
