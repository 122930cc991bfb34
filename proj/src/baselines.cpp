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

#include "codemix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "codemix/error.hpp"
#include "codemix/rng.hpp"

namespace codemix {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_training_set(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                        std::size_t num_features) {
  if (X.size() != y.size()) throw InputError("feature and label counts differ");
  if (X.empty()) throw InputError("cannot train on an empty set");
  std::array<bool, kNumLabels> seen{};
  for (const auto l : y) seen[label_id(l)] = true;
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw InputError("training labels must cover at least two classes");
  }
  for (const auto& x : X) {
    if (!x.empty() && x.entries().back().first >= num_features) {
      throw InputError("feature id " + std::to_string(x.entries().back().first) +
                       " outside a feature space of size " + std::to_string(num_features));
    }
  }
}

void check_dimension(const SparseVector& x, std::size_t num_features) {
  if (!x.empty() && x.entries().back().first >= num_features) {
    throw InputError("feature id " + std::to_string(x.entries().back().first) +
                     " outside the model's feature space of size " + std::to_string(num_features));
  }
}

nlohmann::json scores_to_json(const ClassScores& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const double v : s) {
    if (std::isinf(v) && v < 0) {
      out.push_back(nullptr);
    } else {
      out.push_back(v);
    }
  }
  return out;
}

ClassScores scores_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != kNumLabels) throw InputError("expected 3 per-class values");
  ClassScores s{};
  for (std::size_t i = 0; i < kNumLabels; ++i) s[i] = j[i].is_null() ? kNegInf : j[i].get<double>();
  return s;
}

}  // namespace

SentimentLabel argmax_label(const ClassScores& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumLabels; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<SentimentLabel>(best);
}

NaiveBayesModel nb_train(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                         std::size_t num_features, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be positive");
  if (num_features == 0) throw InputError("feature space is empty");
  check_training_set(X, y, num_features);

  NaiveBayesModel m;
  m.alpha = alpha;
  std::array<std::size_t, kNumLabels> class_count{};
  std::array<std::vector<double>, kNumLabels> mass;
  for (auto& v : mass) v.assign(num_features, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const std::size_t c = label_id(y[i]);
    ++class_count[c];
    for (const auto& [id, w] : X[i]) {
      if (w < 0.0) throw InputError("Naive Bayes needs non-negative feature weights");
      mass[c][id] += w;
    }
  }
  const double n = static_cast<double>(X.size());
  const double t = static_cast<double>(num_features);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    m.class_log_prior[c] =
        class_count[c] == 0 ? kNegInf : std::log(static_cast<double>(class_count[c]) / n);
    const double total = std::accumulate(mass[c].begin(), mass[c].end(), 0.0);
    const double log_denominator = std::log(total + alpha * t);
    auto& fll = m.feature_log_likelihood[c];
    fll.resize(num_features);
    for (std::size_t f = 0; f < num_features; ++f) fll[f] = std::log(mass[c][f] + alpha) - log_denominator;
  }
  return m;
}

Prediction nb_predict(const NaiveBayesModel& m, const SparseVector& x) {
  check_dimension(x, m.num_features());
  ClassScores score = m.class_log_prior;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (std::isinf(score[c])) continue;
    for (const auto& [id, w] : x) score[c] += w * m.feature_log_likelihood[c][id];
  }
  Prediction p;
  p.label = argmax_label(score);
  const double top = score[label_id(p.label)];
  double sum = 0.0;
  for (const double s : score) sum += std::exp(s - top);
  const double lse = top + std::log(sum);
  for (std::size_t c = 0; c < kNumLabels; ++c) p.scores[c] = score[c] - lse;
  return p;
}

nlohmann::json NaiveBayesModel::to_json() const {
  nlohmann::json fll = nlohmann::json::array();
  for (const auto& row : feature_log_likelihood) fll.push_back(row);
  return {{"alpha", alpha}, {"class_log_prior", scores_to_json(class_log_prior)},
          {"feature_log_likelihood", fll}};
}

NaiveBayesModel NaiveBayesModel::from_json(const nlohmann::json& j) {
  try {
    NaiveBayesModel m;
    m.alpha = j.at("alpha").get<double>();
    m.class_log_prior = scores_from_json(j.at("class_log_prior"));
    const auto& fll = j.at("feature_log_likelihood");
    if (!fll.is_array() || fll.size() != kNumLabels) throw InputError("expected 3 likelihood rows");
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      m.feature_log_likelihood[c] = fll[c].get<std::vector<double>>();
      if (m.feature_log_likelihood[c].size() != m.feature_log_likelihood[0].size()) {
        throw InputError("likelihood rows differ in length");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("Naive Bayes model: ") + e.what());
  }
}

LinearSvmModel svm_train(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                         std::size_t num_features, const SvmHyper& hyper) {
  if (!(hyper.lambda > 0.0) || !std::isfinite(hyper.lambda)) throw InputError("lambda must be positive");
  if (num_features == 0) throw InputError("feature space is empty");
  check_training_set(X, y, num_features);

  LinearSvmModel m;
  m.hyper = hyper;
  std::vector<std::size_t> order(X.size());
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    // w = scale * v keeps the per-step shrink O(1).
    std::vector<double> v(num_features, 0.0);
    double scale = 1.0;
    double bias = 0.0;
    Rng rng(mix_seed(hyper.seed, c));
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(std::span<std::size_t>(order));
      for (const std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
        const double target = label_id(y[i]) == c ? 1.0 : -1.0;
        const double margin = target * (scale * dot(v, X[i]) + bias);
        const double shrink = 1.0 - eta * hyper.lambda;
        if (shrink <= 0.0) {
          std::fill(v.begin(), v.end(), 0.0);
          scale = 1.0;
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * target / scale;
          for (const auto& [id, w] : X[i]) v[id] += step * w;
          bias += eta * target;
        }
        if (scale < 1e-9) {
          for (auto& vi : v) vi *= scale;
          scale = 1.0;
        }
      }
      if (!std::isfinite(bias) || !std::isfinite(scale) ||
          !std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); })) {
        throw DivergenceError("SVM training diverged for class " +
                              std::string(label_name(static_cast<SentimentLabel>(c))) + " in epoch " +
                              std::to_string(epoch + 1));
      }
    }
    for (auto& vi : v) vi *= scale;
    m.weights[c] = std::move(v);
    m.bias[c] = bias;
  }
  return m;
}

Prediction svm_predict(const LinearSvmModel& m, const SparseVector& x) {
  check_dimension(x, m.num_features());
  Prediction p;
  for (std::size_t c = 0; c < kNumLabels; ++c) p.scores[c] = dot(m.weights[c], x) + m.bias[c];
  p.label = argmax_label(p.scores);
  return p;
}

nlohmann::json LinearSvmModel::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& row : weights) w.push_back(row);
  return {{"lambda", hyper.lambda}, {"epochs", hyper.epochs}, {"seed", hyper.seed},
          {"weights", w}, {"bias", bias}};
}

LinearSvmModel LinearSvmModel::from_json(const nlohmann::json& j) {
  try {
    LinearSvmModel m;
    m.hyper.lambda = j.at("lambda").get<double>();
    m.hyper.epochs = j.at("epochs").get<std::size_t>();
    m.hyper.seed = j.at("seed").get<std::uint64_t>();
    const auto& w = j.at("weights");
    if (!w.is_array() || w.size() != kNumLabels) throw InputError("expected 3 weight rows");
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      m.weights[c] = w[c].get<std::vector<double>>();
      if (m.weights[c].size() != m.weights[0].size()) throw InputError("weight rows differ in length");
    }
    m.bias = scores_from_json(j.at("bias"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("SVM model: ") + e.what());
  }
}

}  // namespace codemix
