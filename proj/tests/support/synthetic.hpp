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

// Generated corpora for CLI and acceptance tests.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "codemix/label.hpp"
#include "codemix/rng.hpp"

namespace codemix::synthetic {

struct Row {
  std::string text;
  SentimentLabel label;
};

inline void write_jsonl(const std::filesystem::path& path, const std::vector<Row>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  for (const auto& r : rows) {
    os << nlohmann::json{{"text", r.text}, {"label", std::string(label_name(r.label))}}.dump() << '\n';
  }
}

inline void write_label_map(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << R"({"Negative": "negative", "Neutral": "neutral", "Positive": "positive"})" << '\n';
}

/// counts[label id] distinct records that survive preprocessing unchanged.
inline std::vector<Row> counted(const std::array<std::size_t, kNumLabels>& counts) {
  std::vector<Row> rows;
  std::size_t k = 0;
  for (const auto l : kAllLabels) {
    for (std::size_t i = 0; i < counts[label_id(l)]; ++i, ++k) rows.push_back({"sample " + std::to_string(k), l});
  }
  return rows;
}

/// Class-specific vocabulary over shared filler words. Two in five of the
/// polar records express their class as "nahi" plus a word of the opposite
/// class, which bag-of-words models cannot separate from the plain form.
/// A fraction noise of the records get a uniformly drawn label instead.
inline std::vector<Row> sentiment(std::size_t n, double noise, std::uint64_t seed) {
  static const std::vector<std::string> positive = {"mast", "badhiya", "zabardast", "shandaar", "awesome",
                                                    "great", "lovely", "kamaal", "superb", "accha"};
  static const std::vector<std::string> negative = {"bakwas", "bekaar", "ghatiya", "bura", "worst",
                                                    "boring", "faltu", "terrible", "pathetic", "ganda"};
  static const std::vector<std::string> neutral = {"kal", "release", "trailer", "dekha", "news",
                                                   "update", "shayad", "sunday", "ticket", "schedule"};
  static const std::vector<std::string> filler = {"movie", "film", "yaar", "aaj", "bhai", "sach", "ekdum", "story",
                                                  "song", "actor", "match", "team", "phone", "service", "khana"};
  const std::array<const std::vector<std::string>*, kNumLabels> lex = {&negative, &neutral, &positive};
  Rng rng(seed);
  const auto pick = [&](const std::vector<std::string>& v) { return v[rng.below(v.size())]; };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = label_from_id(static_cast<long>(rng.below(kNumLabels)));
    std::vector<std::string> words;
    for (std::uint64_t k = 2 + rng.below(4); k > 0; --k) words.push_back(pick(filler));
    const bool polar = label != SentimentLabel::Neutral;
    std::vector<std::string> cue;
    if (polar && rng.uniform() < 0.4) {
      const auto opposite = label == SentimentLabel::Positive ? SentimentLabel::Negative : SentimentLabel::Positive;
      cue = {"nahi", pick(*lex[label_id(opposite)])};
    } else {
      cue = {pick(*lex[label_id(label)])};
    }
    const std::size_t at = rng.below(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), cue.begin(), cue.end());
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    SentimentLabel noisy = label;
    if (rng.uniform() < noise) noisy = label_from_id(static_cast<long>(rng.below(kNumLabels)));
    rows.push_back({text, noisy});
  }
  return rows;
}

}  // namespace codemix::synthetic
