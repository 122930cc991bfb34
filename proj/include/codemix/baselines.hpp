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
#include <span>
#include <vector>

#include <json.hpp>

#include "codemix/features.hpp"
#include "codemix/label.hpp"

namespace codemix {

using ClassScores = std::array<double, kNumLabels>;

/// Argmax with ties going to the lowest label id.
SentimentLabel argmax_label(const ClassScores& scores);

struct Prediction {
  SentimentLabel label = SentimentLabel::Negative;
  /// Log posteriors (Naive Bayes), decision values (SVM) or probabilities
  /// (transformer), by label id.
  ClassScores scores{};
};

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes over fractional (TF-IDF) counts.

struct NaiveBayesModel {
  /// ln(count(c) / N); -inf for a class absent from training.
  ClassScores class_log_prior{};
  /// [label][feature] = ln((sum_c x_t + alpha) / (sum_c sum_t x_t + alpha * T)).
  std::array<std::vector<double>, kNumLabels> feature_log_likelihood;
  double alpha = 1.0;

  std::size_t num_features() const { return feature_log_likelihood[0].size(); }

  nlohmann::json to_json() const;
  static NaiveBayesModel from_json(const nlohmann::json& j);
};

/// Requires |X| = |y| > 0, alpha > 0, finite non-negative weights, feature
/// ids below `num_features`, and at least two distinct labels (a label with
/// no examples gets a -inf prior and uniform likelihoods).
NaiveBayesModel nb_train(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                         std::size_t num_features, double alpha = 1.0);

/// scores are log posteriors normalized by log-sum-exp.
Prediction nb_predict(const NaiveBayesModel& m, const SparseVector& x);

// ---------------------------------------------------------------------------
// One-vs-rest linear SVM, Pegasos stochastic subgradient.

struct SvmHyper {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
};

struct LinearSvmModel {
  std::array<std::vector<double>, kNumLabels> weights;
  ClassScores bias{};
  SvmHyper hyper;

  std::size_t num_features() const { return weights[0].size(); }

  nlohmann::json to_json() const;
  static LinearSvmModel from_json(const nlohmann::json& j);
};

/// For each label c a binary hinge-loss problem (+1 for c, -1 otherwise)
/// is solved with steps t = 1, 2, ... over `epochs` passes, each pass in a
/// fresh order drawn from Rng(mix_seed(seed, c)):
///
///   eta = 1 / (lambda * t)
///   w  <- (1 - eta * lambda) * w
///   if y (w.x + b) < 1:  w <- w + eta * y * x,  b <- b + eta * y
///
/// The bias is never shrunk. Requires at least two distinct labels; throws
/// DivergenceError if any weight becomes non-finite.
LinearSvmModel svm_train(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                         std::size_t num_features, const SvmHyper& hyper = {});

/// scores are w_c . x + b_c.
Prediction svm_predict(const LinearSvmModel& m, const SparseVector& x);

}  // namespace codemix
