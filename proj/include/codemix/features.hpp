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

// Unigram TF-IDF features.
//
//   weight(t, d) = count(t, d) * (ln((1 + N) / (1 + df(t))) + 1)
//
// followed by L2 normalization of the document vector.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace codemix {

using FeatureId = std::uint32_t;

/// Sorted (feature id, weight) pairs: strictly increasing ids, no zeros,
/// finite weights.
class SparseVector {
 public:
  using Entry = std::pair<FeatureId, double>;

  SparseVector() = default;
  /// Sorts, sums duplicate ids and drops zeros. Throws InputError on a
  /// non-finite weight.
  explicit SparseVector(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  double norm() const;
  SparseVector scaled(double s) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b);

/// a + s * b with exact-zero results elided.
SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double s);

/// Dense-times-sparse dot product; ids past the end of `dense` count as 0.
double dot(const std::vector<double>& dense, const SparseVector& x);

class TermIndex {
 public:
  TermIndex() = default;
  /// Terms must be strictly increasing; 1 <= df[i] <= num_docs.
  TermIndex(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t num_docs);

  std::size_t size() const { return terms_.size(); }
  std::size_t num_docs() const { return num_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }

  /// -1 when the term is not indexed.
  long find(std::string_view term) const;
  double idf(FeatureId id) const;

  nlohmann::json to_json() const;
  static TermIndex from_json(const nlohmann::json& j);

  bool operator==(const TermIndex& o) const {
    return terms_ == o.terms_ && df_ == o.df_ && num_docs_ == o.num_docs_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, FeatureId> ids_;
};

/// Whitespace tokens present in at least `min_df` documents, ids in
/// lexicographic (bytewise) order. Throws InputError when `texts` is empty
/// or every document is empty, or min_df < 1.
TermIndex fit_term_index(const std::vector<std::string>& texts, std::size_t min_df = 1);

/// Unit-norm TF-IDF vector; out-of-index terms are ignored.
SparseVector tfidf_transform(std::string_view text, const TermIndex& idx);

/// Raw term counts over the index (no idf, no normalization).
SparseVector count_transform(std::string_view text, const TermIndex& idx);

void save_term_index(const TermIndex& idx, const std::filesystem::path& path);
TermIndex load_term_index(const std::filesystem::path& path);

}  // namespace codemix
