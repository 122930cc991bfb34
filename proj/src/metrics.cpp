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

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/text.hpp"

namespace codemix {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (const auto v : row) n += v;
  }
  return n;
}

EvalReport report_from_confusion(const ConfusionMatrix& cm) {
  const std::size_t n = cm.total();
  if (n == 0) throw InputError("cannot evaluate zero predictions");
  EvalReport r;
  r.confusion = cm;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      predicted += cm.counts[k][c];
      actual += cm.counts[c][k];
    }
    const std::size_t tp = cm.counts[c][c];
    correct += tp;
    auto& m = r.per_class[c];
    m.support = actual;
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, actual);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0
                                           : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  r.accuracy = ratio(correct, n);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const double w = ratio(r.per_class[c].support, n);
    r.weighted.precision += w * r.per_class[c].precision;
    r.weighted.f1 += w * r.per_class[c].f1;
  }
  // sum_c (support_c / N) * (TP_c / support_c) reduces to sum_c TP_c / N;
  // evaluated in reduced form so it equals accuracy bit for bit.
  r.weighted.recall = r.accuracy;
  return r;
}

EvalReport evaluate(std::span<const SentimentLabel> y_true, std::span<const SentimentLabel> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw InputError("label vectors differ in length: " + std::to_string(y_true.size()) + " vs " +
                     std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw InputError("cannot evaluate zero predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[label_id(y_true[i])][label_id(y_pred[i])];
  return report_from_confusion(cm);
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json per = nlohmann::json::object();
  for (const auto l : kAllLabels) {
    const auto& m = per_class[label_id(l)];
    per[std::string(label_key(l))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  nlohmann::json cm = nlohmann::json::array();
  for (const auto& row : confusion.counts) cm.push_back(row);
  return {{"accuracy", accuracy},
          {"per_class", per},
          {"weighted", {{"precision", weighted.precision}, {"recall", weighted.recall}, {"f1", weighted.f1}}},
          {"confusion", cm}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.accuracy = j.at("accuracy").get<double>();
    for (const auto l : kAllLabels) {
      const auto& m = j.at("per_class").at(std::string(label_key(l)));
      auto& out = r.per_class[label_id(l)];
      out.precision = m.at("precision").get<double>();
      out.recall = m.at("recall").get<double>();
      out.f1 = m.at("f1").get<double>();
      out.support = m.at("support").get<std::size_t>();
    }
    const auto& w = j.at("weighted");
    r.weighted = {w.at("precision").get<double>(), w.at("recall").get<double>(), w.at("f1").get<double>()};
    const auto& cm = j.at("confusion");
    for (std::size_t a = 0; a < kNumLabels; ++a) {
      for (std::size_t b = 0; b < kNumLabels; ++b) r.confusion.counts[a][b] = cm.at(a).at(b).get<std::size_t>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("evaluation report: ") + e.what());
  }
}

std::string per_class_f1_report(const EvalReport& report) {
  std::ostringstream os;
  os << "Per-class F1\n";
  for (const auto l : kAllLabels) {
    os << "  " << label_name(l) << ": " << text::format_fixed(report.per_class[label_id(l)].f1, 2) << '\n';
  }
  return os.str();
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-22s %-19s %-18s\n", "Accuracy", "Precision (Weighted)",
                "Recall (Weighted)", "F1-Score (Weighted)");
  os << line;
  std::snprintf(line, sizeof(line), "%-10s %-22s %-19s %-18s\n", text::format_fixed(r.accuracy, 2).c_str(),
                text::format_fixed(r.weighted.precision, 2).c_str(),
                text::format_fixed(r.weighted.recall, 2).c_str(), text::format_fixed(r.weighted.f1, 2).c_str());
  os << line << '\n';
  std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9s\n", "Class", "Precision", "Recall", "F1", "Support");
  os << line;
  for (const auto l : kAllLabels) {
    const auto& m = r.per_class[label_id(l)];
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9zu\n", std::string(label_name(l)).c_str(),
                  text::format_fixed(m.precision, 2).c_str(), text::format_fixed(m.recall, 2).c_str(),
                  text::format_fixed(m.f1, 2).c_str(), m.support);
    os << line;
  }
  os << "\nConfusion (rows = true, columns = predicted)\n";
  std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s\n", "", "Negative", "Neutral", "Positive");
  os << line;
  for (const auto l : kAllLabels) {
    const auto& row = r.confusion.counts[label_id(l)];
    std::snprintf(line, sizeof(line), "%-10s %9zu %9zu %9zu\n", std::string(label_name(l)).c_str(), row[0],
                  row[1], row[2]);
    os << line;
  }
  return os.str();
}

Comparison compare_models(const std::vector<std::pair<std::string, EvalReport>>& reports) {
  if (reports.empty()) throw InputError("nothing to compare");
  std::size_t width = 5;
  for (const auto& [name, r] : reports) width = std::max(width, name.size());
  Comparison out;
  std::ostringstream table;
  std::ostringstream csv;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %-8s  %-20s  %-17s  %-19s\n", static_cast<int>(width), "Model",
                "Accuracy", "Precision (Weighted)", "Recall (Weighted)", "F1-Score (Weighted)");
  table << line;
  csv << "model,weighted_f1\n";
  for (const auto& [name, r] : reports) {
    std::snprintf(line, sizeof(line), "%-*s  %-8s  %-20s  %-17s  %-19s\n", static_cast<int>(width), name.c_str(),
                  text::format_fixed(r.accuracy, 2).c_str(), text::format_fixed(r.weighted.precision, 2).c_str(),
                  text::format_fixed(r.weighted.recall, 2).c_str(), text::format_fixed(r.weighted.f1, 2).c_str());
    table << line;
    char f1[32];
    std::snprintf(f1, sizeof(f1), "%.6f", r.weighted.f1);
    csv << name << ',' << f1 << '\n';
  }
  out.table = table.str();
  out.csv = csv.str();
  return out;
}

}  // namespace codemix
