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

#ifndef GAPANON_UTF8_H_
#define GAPANON_UTF8_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace gapanon {

// Corpus offsets count Unicode scalar values. Text is kept as UTF-8 at the
// API boundary and decoded to UTF-32 wherever offsets are manipulated.
absl::StatusOr<std::u32string> DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view text);

// Number of scalar values in a valid UTF-8 string.
absl::StatusOr<size_t> Utf8Length(std::string_view bytes);

// Letters, digits, and the in-word joiners (apostrophes and hyphens).
bool IsLetterOrDigit(char32_t c);
bool IsWordJoiner(char32_t c);
bool IsWordChar(char32_t c);

bool IsSpace(char32_t c);

}  // namespace gapanon

#endif  // GAPANON_UTF8_H_
