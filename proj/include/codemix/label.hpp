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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace codemix {

/// Three-way sentiment. The numeric ids are part of every file format.
enum class SentimentLabel : int { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::size_t kNumLabels = 3;

inline constexpr std::array<SentimentLabel, kNumLabels> kAllLabels = {
    SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive};

constexpr std::size_t label_id(SentimentLabel l) { return static_cast<std::size_t>(l); }

/// Throws InputError for ids outside [0, 3).
SentimentLabel label_from_id(long id);

/// "Negative", "Neutral", "Positive".
std::string_view label_name(SentimentLabel l);

/// Lowercase form used in files: "negative", "neutral", "positive".
std::string_view label_key(SentimentLabel l);

/// Case-insensitive match against the three names.
std::optional<SentimentLabel> parse_label(std::string_view s);

}  // namespace codemix
