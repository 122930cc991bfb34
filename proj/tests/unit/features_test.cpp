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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "codemix/error.hpp"
#include "test_util.hpp"

namespace codemix {
namespace {

TEST(SparseVectorTest, CanonicalForm) {
  const SparseVector v({{3, 1.0}, {1, 2.0}, {3, -1.0}, {2, 0.0}, {1, 0.5}});
  EXPECT_EQ(v.entries(), (std::vector<SparseVector::Entry>{{1, 2.5}}));
  EXPECT_THROW(SparseVector({{0, std::nan("")}}), InputError);
  EXPECT_THROW(SparseVector({{0, INFINITY}}), InputError);
}

TEST(SparseVectorTest, Arithmetic) {
  const SparseVector a({{0, 1.0}, {2, 2.0}});
  const SparseVector b({{1, 3.0}, {2, 4.0}});
  EXPECT_DOUBLE_EQ(dot(a, b), 8.0);
  EXPECT_DOUBLE_EQ(a.norm(), std::sqrt(5.0));
  EXPECT_EQ(add_scaled(a, b, -0.5), SparseVector({{0, 1.0}, {1, -1.5}}));
  EXPECT_EQ(a.scaled(2.0), SparseVector({{0, 2.0}, {2, 4.0}}));
  EXPECT_DOUBLE_EQ(dot(std::vector<double>{1.0, 1.0}, a), 1.0);
}

TEST(TermIndexTest, DocumentFrequency) {
  const TermIndex idx = fit_term_index({"a b", "a"});
  EXPECT_EQ(idx.terms(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(idx.document_frequency(), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(idx.num_docs(), 2u);
  const TermIndex pruned = fit_term_index({"a b", "a"}, 2);
  EXPECT_EQ(pruned.terms(), (std::vector<std::string>{"a"}));
  EXPECT_EQ(pruned.find("b"), -1);
}

TEST(TermIndexTest, RepeatedTermCountsOncePerDocument) {
  const TermIndex idx = fit_term_index({"x x x", "y"});
  EXPECT_EQ(idx.document_frequency(), (std::vector<std::size_t>{1, 1}));
}

TEST(TermIndexTest, Errors) {
  EXPECT_THROW(fit_term_index({}), InputError);
  EXPECT_THROW(fit_term_index({"", "  "}), InputError);
  EXPECT_THROW(fit_term_index({"a"}, 0), InputError);
  EXPECT_THROW(TermIndex({"b", "a"}, {1, 1}, 1), InputError);
  EXPECT_THROW(TermIndex({"a"}, {2}, 1), InputError);
}

TEST(TfidfTest, WorkedExample) {
  const TermIndex idx = fit_term_index({"a b", "a"});
  const SparseVector v = tfidf_transform("a b", idx);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v.entries()[0].second, 0.580, 1e-3);
  EXPECT_NEAR(v.entries()[1].second, 0.815, 1e-3);
  const double idf_b = std::log(3.0 / 2.0) + 1.0;
  const double norm = std::sqrt(1.0 + idf_b * idf_b);
  EXPECT_NEAR(v.entries()[0].second, 1.0 / norm, 1e-12);
  EXPECT_NEAR(v.entries()[1].second, idf_b / norm, 1e-12);
}

TEST(TfidfTest, UnknownTermsAndEmpty) {
  const TermIndex idx = fit_term_index({"a b", "a"});
  EXPECT_TRUE(tfidf_transform("zzz", idx).empty());
  EXPECT_TRUE(tfidf_transform("", idx).empty());
  EXPECT_EQ(count_transform("a a zzz b", idx), SparseVector({{0, 2.0}, {1, 1.0}}));
}

TEST(TfidfPropertyTest, UnitNormAndIdfFloor) {
  std::mt19937_64 gen(8);
  const std::vector<std::string> words = {"mast", "bakwas", "film", "yaar", "acha", "bura", "hai", "nahi"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::vector<std::string> docs;
  for (int i = 0; i < 100; ++i) {
    std::string d;
    for (std::size_t k = len(gen); k > 0; --k) d += words[pick(gen)] + " ";
    docs.push_back(d);
  }
  const TermIndex idx = fit_term_index(docs);
  for (FeatureId id = 0; id < idx.size(); ++id) EXPECT_GE(idx.idf(id), 1.0);
  for (const auto& d : docs) {
    const SparseVector v = tfidf_transform(d, idx);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    for (const auto& [id, w] : v) EXPECT_GT(w, 0.0);
  }
}

TEST(TermIndexTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const TermIndex idx = fit_term_index({"a b", "a", "é c"});
  save_term_index(idx, dir / "t.json");
  EXPECT_EQ(load_term_index(dir / "t.json"), idx);
  EXPECT_EQ(TermIndex::from_json(idx.to_json()), idx);
}

}  // namespace
}  // namespace codemix
