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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "codemix/label.hpp"

namespace codemix {

/// Rows are true labels, columns predicted labels.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> counts{};

  std::size_t total() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

struct WeightedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const WeightedMetrics&) const = default;
};

struct EvalReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, kNumLabels> per_class{};
  WeightedMetrics weighted;
  ConfusionMatrix confusion;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  bool operator==(const EvalReport&) const = default;
};

/// Undefined precision, recall or F1 (zero denominator) is reported as 0.
/// Weighted metrics use support / N as weights. Throws InputError on empty
/// input or a length mismatch.
EvalReport evaluate(std::span<const SentimentLabel> y_true, std::span<const SentimentLabel> y_pred);

/// Builds the report from an existing confusion matrix.
EvalReport report_from_confusion(const ConfusionMatrix& cm);

/// "Negative: 0.71" style rows in label-id order, two decimals.
std::string per_class_f1_report(const EvalReport& report);

/// Accuracy / weighted P / weighted R / weighted F1 plus per-class
/// precision, recall, F1 and support, and the confusion matrix.
std::string format_report(const EvalReport& report);

struct Comparison {
  std::string table;
  /// "model,weighted_f1" rows for plotting.
  std::string csv;
};

/// One row per model: accuracy, weighted precision, recall and F1 at two
/// decimals, in input order.
Comparison compare_models(const std::vector<std::pair<std::string, EvalReport>>& reports);

}  // namespace codemix
