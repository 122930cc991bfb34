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

#include "codemix/label.hpp"

#include "codemix/error.hpp"
#include "codemix/text.hpp"

namespace codemix {

SentimentLabel label_from_id(long id) {
  if (id < 0 || id >= static_cast<long>(kNumLabels)) {
    throw InputError("label id out of range: " + std::to_string(id));
  }
  return static_cast<SentimentLabel>(id);
}

std::string_view label_name(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Negative: return "Negative";
    case SentimentLabel::Neutral: return "Neutral";
    case SentimentLabel::Positive: return "Positive";
  }
  return "?";
}

std::string_view label_key(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "?";
}

std::optional<SentimentLabel> parse_label(std::string_view s) {
  const std::string lower = text::lowercase(s);
  for (const auto l : kAllLabels) {
    if (lower == label_key(l)) return l;
  }
  return std::nullopt;
}

}  // namespace codemix
