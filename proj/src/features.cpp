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

#include "codemix/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "codemix/error.hpp"
#include "codemix/text.hpp"

namespace codemix {

SparseVector::SparseVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& [id, w] : entries) {
    if (!std::isfinite(w)) throw InputError("non-finite weight for feature " + std::to_string(id));
    if (!entries_.empty() && entries_.back().first == id) {
      entries_.back().second += w;
    } else {
      entries_.emplace_back(id, w);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::norm() const { return std::sqrt(dot(*this, *this)); }

SparseVector SparseVector::scaled(double s) const {
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.second *= s;
  return SparseVector(std::move(out));
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

double dot(const std::vector<double>& dense, const SparseVector& x) {
  double sum = 0.0;
  for (const auto& [id, w] : x) {
    if (id < dense.size()) sum += dense[id] * w;
  }
  return sum;
}

SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double s) {
  std::vector<SparseVector::Entry> out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, s * ib->second);
      ++ib;
    } else {
      out.emplace_back(ia->first, ia->second + s * ib->second);
      ++ia;
      ++ib;
    }
  }
  return SparseVector(std::move(out));
}

TermIndex::TermIndex(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t num_docs)
    : terms_(std::move(terms)), df_(std::move(df)), num_docs_(num_docs) {
  if (terms_.size() != df_.size()) throw InputError("term index: terms and df differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw InputError("term index: terms must be unique and sorted (at \"" + terms_[i] + "\")");
    }
    if (df_[i] < 1 || df_[i] > num_docs_) {
      throw InputError("term index: df out of range for \"" + terms_[i] + "\"");
    }
    ids_.emplace(terms_[i], static_cast<FeatureId>(i));
  }
}

long TermIndex::find(std::string_view term) const {
  const auto it = ids_.find(std::string(term));
  return it == ids_.end() ? -1 : static_cast<long>(it->second);
}

double TermIndex::idf(FeatureId id) const {
  const double n = static_cast<double>(num_docs_);
  return std::log((1.0 + n) / (1.0 + static_cast<double>(df_.at(id)))) + 1.0;
}

nlohmann::json TermIndex::to_json() const {
  return {{"terms", terms_}, {"df", df_}, {"num_docs", num_docs_}};
}

TermIndex TermIndex::from_json(const nlohmann::json& j) {
  try {
    return TermIndex(j.at("terms").get<std::vector<std::string>>(),
                     j.at("df").get<std::vector<std::size_t>>(), j.at("num_docs").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("term index: ") + e.what());
  }
}

TermIndex fit_term_index(const std::vector<std::string>& texts, std::size_t min_df) {
  if (min_df < 1) throw InputError("min_df must be at least 1");
  if (texts.empty()) throw InputError("cannot fit a term index on zero documents");
  std::map<std::string, std::size_t> df;
  bool any = false;
  for (const auto& t : texts) {
    const auto tokens = text::split_whitespace(t);
    any = any || !tokens.empty();
    for (const auto& term : std::set<std::string>(tokens.begin(), tokens.end())) ++df[term];
  }
  if (!any) throw InputError("cannot fit a term index: every document is empty");
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  for (const auto& [term, n] : df) {
    if (n >= min_df) {
      terms.push_back(term);
      counts.push_back(n);
    }
  }
  return TermIndex(std::move(terms), std::move(counts), texts.size());
}

SparseVector count_transform(std::string_view input, const TermIndex& idx) {
  std::map<FeatureId, double> counts;
  for (const auto& term : text::split_whitespace(input)) {
    if (const long id = idx.find(term); id >= 0) counts[static_cast<FeatureId>(id)] += 1.0;
  }
  return SparseVector(std::vector<SparseVector::Entry>(counts.begin(), counts.end()));
}

SparseVector tfidf_transform(std::string_view input, const TermIndex& idx) {
  std::vector<SparseVector::Entry> entries = count_transform(input, idx).entries();
  double sq = 0.0;
  for (auto& [id, w] : entries) {
    w *= idx.idf(id);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.second *= inv;
  }
  return SparseVector(std::move(entries));
}

void save_term_index(const TermIndex& idx, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << idx.to_json().dump() << '\n';
}

TermIndex load_term_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open term index: " + path.string());
  try {
    return TermIndex::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace codemix
