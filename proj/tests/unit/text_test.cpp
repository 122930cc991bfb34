// Copyright 2026 The codemix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "codemix/text.hpp"

#include <gtest/gtest.h>

namespace codemix::text {
namespace {

TEST(TextTest, DecodeMixedWidths) {
  const auto cps = decode("a\xC3\xA9\xE0\xA4\x95\xF0\x9F\x98\x82");  // a, e-acute, ka, face with tears
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[0].value, U'a');
  EXPECT_EQ(cps[1].value, U'é');
  EXPECT_EQ(cps[2].value, U'क');
  EXPECT_EQ(cps[3].value, U'\U0001F602');
  EXPECT_EQ(cps[3].offset, 6u);
  EXPECT_EQ(cps[3].length, 4u);
}

TEST(TextTest, InvalidBytesBecomeReplacement) {
  const auto cps = decode("a\xFF" "b");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1].value, U'�');
  EXPECT_EQ(cps[1].length, 1u);
}

TEST(TextTest, AppendUtf8RoundTrip) {
  std::string s;
  for (char32_t cp : {U'x', U'ü', U'न', U'\U0001F60D'}) append_utf8(s, cp);
  std::u32string back;
  for (const auto& c : decode(s)) back.push_back(c.value);
  EXPECT_EQ(back, U"xüन\U0001F60D");
  EXPECT_EQ(length(s), 4u);
}

TEST(TextTest, Alphabetic) {
  EXPECT_TRUE(is_alphabetic(U'a'));
  EXPECT_TRUE(is_alphabetic(U'क'));  // Devanagari ka
  EXPECT_TRUE(is_alphabetic(U'é'));
  EXPECT_FALSE(is_alphabetic(U'7'));
  EXPECT_FALSE(is_alphabetic(U'!'));
  EXPECT_FALSE(is_alphabetic(U'\U0001F602'));
  EXPECT_TRUE(has_alphabetic("!!a!!"));
  EXPECT_FALSE(has_alphabetic("!!!??? 123"));
}

TEST(TextTest, Pictographic) {
  EXPECT_TRUE(is_pictographic(U'\U0001F602'));
  EXPECT_TRUE(is_pictographic(U'❤'));
  EXPECT_TRUE(is_pictographic(U'️'));
  EXPECT_FALSE(is_pictographic(U'a'));
  EXPECT_FALSE(is_pictographic(U'#'));
}

TEST(TextTest, Lowercase) {
  EXPECT_EQ(lowercase("The Movie IS Good"), "the movie is good");
  EXPECT_EQ(lowercase("\xC3\x89T\xC3\x89"), "\xC3\xA9t\xC3\xA9");  // ETE with acutes
  EXPECT_EQ(lowercase("\xD0\x9F\xD1\x80\xD0\xB8"), "\xD0\xBF\xD1\x80\xD0\xB8");  // Cyrillic
  EXPECT_EQ(lowercase("\xE0\xA4\x95"), "\xE0\xA4\x95");  // caseless script unchanged
  EXPECT_FALSE(is_upper(U'a'));
  EXPECT_TRUE(is_upper(U'Z'));
}

TEST(TextTest, Whitespace) {
  EXPECT_EQ(collapse_whitespace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(collapse_whitespace("   "), "");
  EXPECT_EQ(split_whitespace(" x  y "), (std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(split_whitespace("").empty());
  EXPECT_TRUE(is_space(U' '));
  EXPECT_EQ(join({"a", "b", "c"}, "-"), "a-b-c");
}

TEST(TextTest, FormatFixedRoundsHalfUp) {
  EXPECT_EQ(format_fixed(2.0 / 3.0, 2), "0.67");
  EXPECT_EQ(format_fixed(0.125, 2), "0.13");
  EXPECT_EQ(format_fixed(0.71, 2), "0.71");
  EXPECT_EQ(format_fixed(0.6, 2), "0.60");
  EXPECT_EQ(format_fixed(0.0, 2), "0.00");
  EXPECT_EQ(format_fixed(37.2731, 1), "37.3");
  EXPECT_EQ(format_fixed(1.0, 4), "1.0000");
}

TEST(TextTest, FormatCount) {
  EXPECT_EQ(format_count(0), "0");
  EXPECT_EQ(format_count(999), "999");
  EXPECT_EQ(format_count(8987), "8,987");
  EXPECT_EQ(format_count(24111), "24,111");
  EXPECT_EQ(format_count(1234567), "1,234,567");
}

}  // namespace
}  // namespace codemix::text
