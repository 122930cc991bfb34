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

#include "codemix/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "codemix/error.hpp"

namespace codemix {
namespace {

std::vector<SentimentLabel> labels(std::initializer_list<int> ids) {
  std::vector<SentimentLabel> out;
  for (const int i : ids) out.push_back(label_from_id(i));
  return out;
}

TEST(MetricsTest, WorkedExample) {
  const EvalReport r = evaluate(labels({0, 0, 1, 2}), labels({0, 1, 1, 2}));
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_NEAR(r.per_class[0].f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.per_class[1].f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.per_class[2].f1, 1.0, 1e-12);
  EXPECT_NEAR(r.weighted.f1, 0.75, 1e-12);
  EXPECT_EQ(r.per_class[0].support, 2u);
  EXPECT_EQ(r.confusion.counts[0][1], 1u);
}

TEST(MetricsTest, UndefinedRatiosAreZero) {
  const EvalReport r = evaluate(labels({0, 0}), labels({1, 1}));
  EXPECT_EQ(r.per_class[0].precision, 0.0);
  EXPECT_EQ(r.per_class[0].recall, 0.0);
  EXPECT_EQ(r.per_class[2].f1, 0.0);
  EXPECT_EQ(r.accuracy, 0.0);
}

TEST(MetricsTest, Errors) {
  EXPECT_THROW(evaluate(labels({}), labels({})), InputError);
  EXPECT_THROW(evaluate(labels({0}), labels({0, 1})), InputError);
}

// Direct count-based recomputation, one class at a time.
struct Oracle {
  double accuracy, wp, wr, wf1;
};

Oracle brute_force(const std::vector<SentimentLabel>& t, const std::vector<SentimentLabel>& p) {
  const double n = static_cast<double>(t.size());
  Oracle o{0, 0, 0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) o.accuracy += t[i] == p[i] ? 1.0 / n : 0.0;
  for (const auto c : kAllLabels) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == c && p[i] == c) tp += 1;
      if (t[i] != c && p[i] == c) fp += 1;
      if (t[i] == c && p[i] != c) fn += 1;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    const double w = (tp + fn) / n;
    o.wp += w * prec;
    o.wr += w * rec;
    o.wf1 += w * f1;
  }
  return o;
}

TEST(MetricsPropertyTest, AgreesWithBruteForce) {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> lab(0, 2);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SentimentLabel> t, p;
    for (std::size_t i = len(gen); i > 0; --i) {
      t.push_back(label_from_id(lab(gen)));
      p.push_back(gen() % 3 == 0 ? t.back() : label_from_id(lab(gen)));
    }
    const EvalReport r = evaluate(t, p);
    const Oracle o = brute_force(t, p);
    ASSERT_NEAR(r.accuracy, o.accuracy, 1e-12);
    ASSERT_NEAR(r.weighted.precision, o.wp, 1e-12);
    ASSERT_NEAR(r.weighted.recall, o.wr, 1e-12);
    ASSERT_NEAR(r.weighted.f1, o.wf1, 1e-12);
    ASSERT_EQ(r.weighted.recall, r.accuracy);
    for (const auto& m : r.per_class) {
      ASSERT_GE(m.f1, 0.0);
      ASSERT_LE(m.f1, 1.0);
      ASSERT_LE(m.f1, std::max(m.precision, m.recall) + 1e-12);
    }
    ASSERT_EQ(r.confusion.total(), t.size());

    std::vector<std::size_t> perm(t.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<SentimentLabel> t2, p2;
    for (const auto i : perm) {
      t2.push_back(t[i]);
      p2.push_back(p[i]);
    }
    ASSERT_EQ(evaluate(t2, p2), r);
  }
}

TEST(MetricsTest, PerfectPrediction) {
  const auto y = labels({0, 1, 2, 2, 1});
  const EvalReport r = evaluate(y, y);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.weighted.f1, 1.0);
}

TEST(ReportFormatTest, PerClassF1Lines) {
  EvalReport r;
  r.per_class[0].f1 = 0.7149;
  r.per_class[1].f1 = 0.6;
  r.per_class[2].f1 = 0.695;
  EXPECT_EQ(per_class_f1_report(r), "Per-class F1\n  Negative: 0.71\n  Neutral: 0.60\n  Positive: 0.70\n");
}

TEST(ReportFormatTest, FullReportHasHeadlineRow) {
  const EvalReport r = evaluate(labels({0, 0, 1, 2}), labels({0, 1, 1, 2}));
  const std::string s = format_report(r);
  EXPECT_NE(s.find("Accuracy"), std::string::npos);
  EXPECT_NE(s.find("F1-Score (Weighted)"), std::string::npos);
  EXPECT_NE(s.find("0.75"), std::string::npos);
  EXPECT_NE(s.find("0.67"), std::string::npos);
}

TEST(ReportJsonTest, RoundTrip) {
  const EvalReport r = evaluate(labels({0, 0, 1, 2, 2}), labels({0, 1, 1, 2, 0}));
  EXPECT_EQ(EvalReport::from_json(r.to_json()), r);
  EXPECT_THROW(EvalReport::from_json(nlohmann::json::object()), InputError);
}

TEST(CompareModelsTest, RowsInInputOrder) {
  const EvalReport a = evaluate(labels({0, 1, 2}), labels({0, 1, 2}));
  const EvalReport b = evaluate(labels({0, 0, 1, 2}), labels({0, 1, 1, 2}));
  const Comparison c = compare_models({{"Naive Bayes", b}, {"Transformer", a}});
  const auto nb = c.table.find("Naive Bayes");
  const auto tr = c.table.find("Transformer");
  ASSERT_NE(nb, std::string::npos);
  EXPECT_LT(nb, tr);
  EXPECT_NE(c.table.find("1.00"), std::string::npos);
  EXPECT_EQ(c.csv, "model,weighted_f1\nNaive Bayes,0.750000\nTransformer,1.000000\n");
  EXPECT_THROW(compare_models({}), InputError);
}

}  // namespace
}  // namespace codemix
