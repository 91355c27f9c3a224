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

#include "gapanon/utf8.h"

#include "gtest/gtest.h"

namespace gapanon {
namespace {

TEST(Utf8Test, RoundTripsMultibyte) {
  const std::string text = "Zo\xC3\xAB \xE2\x80\x99s \xF0\x9F\x98\x80";
  absl::StatusOr<std::u32string> decoded = DecodeUtf8(text);
  ASSERT_TRUE(decoded.ok());
  EXPECT_EQ(decoded->size(), 8u);
  EXPECT_EQ(EncodeUtf8(*decoded), text);
}

TEST(Utf8Test, RejectsMalformed) {
  EXPECT_FALSE(DecodeUtf8("\xC3").ok());
  EXPECT_FALSE(DecodeUtf8("\xC0\x80").ok());
  EXPECT_FALSE(DecodeUtf8("\xED\xA0\x80").ok());
  EXPECT_FALSE(DecodeUtf8("\x80").ok());
  EXPECT_FALSE(DecodeUtf8("\xF4\x90\x80\x80").ok());
}

TEST(Utf8Test, LengthCountsCodePoints) {
  EXPECT_EQ(*Utf8Length("Ren\xC3\xA9"), 4u);
  EXPECT_EQ(*Utf8Length(""), 0u);
}

TEST(Utf8Test, WordCharacterClasses) {
  EXPECT_TRUE(IsLetterOrDigit(U'a'));
  EXPECT_TRUE(IsLetterOrDigit(U'7'));
  EXPECT_TRUE(IsLetterOrDigit(0xE9));
  EXPECT_TRUE(IsLetterOrDigit(0x0416));
  EXPECT_FALSE(IsLetterOrDigit(U'.'));
  EXPECT_FALSE(IsLetterOrDigit(0xD7));
  EXPECT_FALSE(IsLetterOrDigit(0x201C));
  EXPECT_TRUE(IsWordJoiner(U'\''));
  EXPECT_TRUE(IsWordJoiner(0x2019));
  EXPECT_FALSE(IsWordJoiner(U'.'));
  EXPECT_TRUE(IsSpace(0xA0));
  EXPECT_FALSE(IsSpace(U'x'));
}

}  // namespace
}  // namespace gapanon
