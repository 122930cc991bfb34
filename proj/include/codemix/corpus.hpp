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
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "codemix/label.hpp"

namespace codemix {

struct LabeledTweet {
  std::string id;
  std::string text;
  SentimentLabel label = SentimentLabel::Neutral;
  std::string source;

  bool operator==(const LabeledTweet&) const = default;
};

/// Ordered collection of records with unique ids.
class Corpus {
 public:
  Corpus() = default;
  /// Throws InputError if two records share an id.
  explicit Corpus(std::vector<LabeledTweet> records);

  const std::vector<LabeledTweet>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const LabeledTweet& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::vector<std::string> texts() const;
  std::vector<SentimentLabel> labels() const;

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<LabeledTweet> records_;
};

enum class CorpusFormat { Jsonl, Csv };

/// Picks the format from the extension (.jsonl/.json -> Jsonl, .csv -> Csv).
CorpusFormat format_from_path(const std::filesystem::path& path);

using LabelMap = std::map<std::string, SentimentLabel>;

/// JSON object of raw label -> "negative" | "neutral" | "positive".
LabelMap load_label_map(const std::filesystem::path& path);

/// Reads a JSONL or CSV corpus and maps raw labels through `label_map`.
/// Records without an id get their 0-based record index; records without a
/// source get the file stem. Errors carry the 1-based line number; unmapped
/// labels are collected across the whole file and reported together.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LabelMap& label_map);

/// Writes the JSONL form: {"id","text","label","source"} with label keys.
void save_corpus_jsonl(const Corpus& c, const std::filesystem::path& path);

/// Concatenation. Ids of `a` are kept; an id of `b` that is already taken
/// becomes "<id>.<k>" with the smallest free k >= 1.
Corpus merge(const Corpus& a, const Corpus& b);

enum class DedupKey { ExactText, NormalizedText };

/// Key used by DedupKey::NormalizedText: URL/mention/hashtag normalization,
/// lowercasing, and punctuation trimmed from both ends of each token.
std::string normalized_dedup_key(const std::string& text);

/// Keeps the first record for each key, preserving order.
Corpus dedup(const Corpus& c, DedupKey key = DedupKey::ExactText);

struct ClassDistribution {
  std::array<std::size_t, kNumLabels> counts{};
  std::array<double, kNumLabels> fractions{};
  std::size_t total = 0;
};

/// Throws InputError on an empty corpus.
ClassDistribution class_distribution(const Corpus& c);

/// Table with one row per class ordered by count (descending, ties by label
/// id) plus a total row; percentages at one decimal, round-half-up.
std::string format_distribution(const ClassDistribution& d);

/// CSV "label,label_id,count,fraction" for external plotting.
std::string distribution_csv(const ClassDistribution& d);

/// An exact rational in (0, 1).
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

struct SplitSpec {
  Fraction train{8, 10};
  Fraction val{1, 10};
  std::uint64_t seed = 0;

  /// Throws InputError unless 0 < train, 0 < val and train + val < 1.
  void validate() const;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// Global targets: floor(train*N), floor(val*N), and the rest.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
  std::vector<std::string> warnings;
};

/// Stratified, seeded split.
///
/// Each class (in label-id order) is shuffled with one shared Rng seeded
/// from spec.seed. Per-class train counts start at floor(n_c * train) and
/// are topped up one record at a time, largest fractional part first with
/// ties by label id, until the global train target is met; validation is
/// allocated the same way from what remains, and test takes the rest.
/// Classes with fewer than 3 records go to train wholesale (with a warning).
/// Each output keeps the input's relative record order.
CorpusSplit split(const Corpus& c, const SplitSpec& spec);

}  // namespace codemix
