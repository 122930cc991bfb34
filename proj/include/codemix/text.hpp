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

// UTF-8 and character-class helpers shared by the preprocessing and
// tokenization stages. Character classes are table driven and cover the
// scripts that show up in Romanized code-mixed text (Latin, Devanagari and
// the other Indic blocks, Greek, Cyrillic, Arabic, CJK); they are not a full
// Unicode database.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codemix::text {

/// One decoded code point and the byte range it occupies.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

/// Decodes UTF-8. Invalid bytes decode to U+FFFD with length 1, so the
/// byte ranges always tile the input.
std::vector<CodePoint> decode(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

/// Number of code points.
std::size_t length(std::string_view s);

bool is_space(char32_t cp);
bool is_alphabetic(char32_t cp);
bool is_upper(char32_t cp);
char32_t to_lower(char32_t cp);

/// Emoji, pictographs, dingbats and the joiners/modifiers that glue emoji
/// sequences together (ZWJ, variation selectors, skin tones, keycap, tags).
bool is_pictographic(char32_t cp);

bool has_alphabetic(std::string_view s);
std::string lowercase(std::string_view s);

/// Splits on runs of Unicode whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Collapses whitespace runs to a single ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Round-half-up fixed-point rendering ("0.665" -> "0.67"). A relative
/// slack of 1e-9 absorbs binary representation error at the half point.
std::string format_fixed(double value, int decimals);

/// Integer with thousands separators: 24111 -> "24,111".
std::string format_count(std::size_t n);

}  // namespace codemix::text
