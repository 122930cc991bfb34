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

// Transformer-encoder sentence classifier with explicit backpropagation.
//
// Architecture (post-norm, as in BERT):
//
//   h0 = E_tok[ids] + E_pos[positions]
//   for each layer:
//     h = LayerNorm(h + Dropout(MultiHeadSelfAttention(h)))
//     h = LayerNorm(h + Dropout(W2 GELU(W1 h + b1) + b2))
//   logits = W_head Dropout(h[CLS]) + b_head
//
// Attention keys at masked (PAD) positions receive -inf scores. Because
// every other stage is position-wise, rows at masked positions never reach
// the [CLS] output; the implementation therefore evaluates only the
// unmasked positions, which is exactly equivalent for logits and gradients.
//
// All arithmetic is double precision. Row-vector convention: x W with W
// stored [in x out].

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "codemix/baselines.hpp"
#include "codemix/label.hpp"
#include "codemix/tokenizer.hpp"

namespace codemix {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EncoderConfig {
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t d_model = 128;
  std::size_t d_ff = 256;
  double dropout = 0.1;
  std::size_t max_len = 128;
  std::size_t vocab_size = 0;
  std::size_t num_classes = kNumLabels;

  void validate() const;
  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
  bool operator==(const EncoderConfig&) const = default;
};

struct LayerParams {
  Matrix wq, wk, wv, wo;  // [d_model x d_model]
  Matrix bq, bk, bv, bo;  // [1 x d_model]
  Matrix w1;              // [d_model x d_ff]
  Matrix b1;              // [1 x d_ff]
  Matrix w2;              // [d_ff x d_model]
  Matrix b2;              // [1 x d_model]
  Matrix ln1_gain, ln1_bias, ln2_gain, ln2_bias;  // [1 x d_model]
};

/// Every learned tensor. `for_each` visits them in the fixed order used by
/// initialization, the optimizer and the model file.
struct TransformerParams {
  Matrix token_embedding;     // [vocab_size x d_model]
  Matrix position_embedding;  // [max_len x d_model]
  std::vector<LayerParams> layers;
  Matrix head_weight;  // [d_model x num_classes]
  Matrix head_bias;    // [1 x num_classes]

  /// All-zero tensors with the shapes `cfg` implies.
  static TransformerParams zeros(const EncoderConfig& cfg);

  /// f(name, tensor, decayed); `decayed` is false for biases and
  /// layer-norm parameters.
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  std::size_t num_parameters() const;
  bool all_finite() const;
  bool operator==(const TransformerParams& other) const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f(std::string("embeddings.token"), self.token_embedding, true);
    f(std::string("embeddings.position"), self.position_embedding, true);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      auto& l = self.layers[i];
      const std::string p = "layers." + std::to_string(i) + ".";
      f(p + "attention.query.weight", l.wq, true);
      f(p + "attention.query.bias", l.bq, false);
      f(p + "attention.key.weight", l.wk, true);
      f(p + "attention.key.bias", l.bk, false);
      f(p + "attention.value.weight", l.wv, true);
      f(p + "attention.value.bias", l.bv, false);
      f(p + "attention.output.weight", l.wo, true);
      f(p + "attention.output.bias", l.bo, false);
      f(p + "attention_norm.gain", l.ln1_gain, false);
      f(p + "attention_norm.bias", l.ln1_bias, false);
      f(p + "ffn.inner.weight", l.w1, true);
      f(p + "ffn.inner.bias", l.b1, false);
      f(p + "ffn.outer.weight", l.w2, true);
      f(p + "ffn.outer.bias", l.b2, false);
      f(p + "ffn_norm.gain", l.ln2_gain, false);
      f(p + "ffn_norm.bias", l.ln2_bias, false);
    }
    f(std::string("head.weight"), self.head_weight, true);
    f(std::string("head.bias"), self.head_bias, false);
  }
};

/// N(0, 0.02^2) for embeddings and weight matrices, zero biases, unit
/// layer-norm gains. Draws happen in for_each order from Rng(seed).
TransformerParams init_params(const EncoderConfig& cfg, std::uint64_t seed);

/// Zeroes the classification head; logits become exactly 0.
void zero_head(TransformerParams& params);

namespace nn {

inline constexpr double kLayerNormEps = 1e-12;

double gelu(double x);
double gelu_grad(double x);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

/// Row-wise (x - mean) / sqrt(var + eps), before gain and bias.
Matrix normalize_rows(const Matrix& x, Eigen::VectorXd* inv_std = nullptr);

}  // namespace nn

/// Intermediate values of one layer for one example; n = unmasked length.
struct LayerCache {
  Matrix input;                   // n x d
  Matrix q, k, v;                 // n x d
  std::vector<Matrix> attention;  // per head, n x n, rows sum to 1
  Matrix context;                 // n x d, concatenated heads
  Matrix attn_dropout;            // n x d scale mask, empty when inactive
  Matrix xhat1;                   // n x d
  Eigen::VectorXd inv_std1;
  Matrix hidden1;                 // n x d, first layer-norm output
  Matrix pre_act;                 // n x d_ff
  Matrix activated;               // n x d_ff
  Matrix ffn_dropout;             // n x d
  Matrix xhat2;
  Eigen::VectorXd inv_std2;
};

struct ExampleCache {
  std::vector<std::size_t> positions;  // unmasked positions, CLS first
  std::vector<TokenId> ids;            // ids at those positions
  std::vector<LayerCache> layers;
  Matrix output;                       // n x d, last layer output
  Matrix cls_dropout;                  // 1 x d scale mask, empty when inactive
  Matrix cls;                          // 1 x d, after dropout
};

struct ForwardResult {
  Matrix logits;  // batch x num_classes
  std::vector<ExampleCache> cache;
};

/// Throws InputError for malformed encodings (wrong length, id out of range,
/// masked CLS) and DivergenceError for non-finite activations. Dropout masks
/// come from Rng(seed) and are drawn only when train_mode is set.
ForwardResult forward(const TransformerParams& params, const EncoderConfig& cfg,
                      std::span<const Encoding> batch, bool train_mode, std::uint64_t seed = 0);

struct LossResult {
  double loss = 0.0;
  TransformerParams grads;
  Matrix logits;
};

/// Mean cross-entropy over the batch and its exact gradient.
LossResult loss_and_grads(const TransformerParams& params, const EncoderConfig& cfg,
                          std::span<const Encoding> batch, std::span<const SentimentLabel> labels,
                          bool train_mode = false, std::uint64_t seed = 0);

/// Loss only (no gradient), eval or seeded-dropout mode.
double loss_only(const TransformerParams& params, const EncoderConfig& cfg, std::span<const Encoding> batch,
                 std::span<const SentimentLabel> labels, bool train_mode = false, std::uint64_t seed = 0);

enum class LrSchedule { LinearDecay, Constant };

struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t epochs = 3;
  std::size_t batch_size = 8;
  double weight_decay = 0.01;
  std::size_t warmup_steps = 500;
  std::uint64_t seed = 0;
  LrSchedule schedule = LrSchedule::LinearDecay;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  bool operator==(const TrainConfig&) const = default;
};

/// Linear warmup from 0 to learning_rate over warmup_steps, then linear
/// decay to 0 at total_steps (or constant, per tc.schedule). With
/// total_steps <= warmup_steps only the warmup ramp applies.
double lr_schedule(std::size_t step, const TrainConfig& tc, std::size_t total_steps);

struct AdamState {
  TransformerParams m;
  TransformerParams v;
  std::uint64_t step = 0;

  static AdamState zeros(const EncoderConfig& cfg);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

/// One AdamW update with bias correction; decay p <- p - lr * wd * p is
/// applied to `decayed` tensors only. Throws DivergenceError if any
/// parameter becomes non-finite.
void adamw_step(TransformerParams& params, const TransformerParams& grads, AdamState& state,
                const TrainConfig& tc, double lr);

struct LabeledEncodings {
  std::vector<Encoding> inputs;
  std::vector<SentimentLabel> labels;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> val_weighted_f1;

  bool operator==(const EpochLog&) const = default;
};

struct TrainResult {
  TransformerParams final_params;
  TransformerParams best_params;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  std::vector<EpochLog> log;
};

/// Mini-batch AdamW training from `init`. Each epoch visits the training
/// set in an order drawn from a seeded Rng; step s uses lr_schedule(s) and
/// dropout seed mix_seed(tc.seed, s). best_params is the epoch with the
/// highest validation weighted F1 (earliest on ties), or the final epoch
/// when `val` is empty. Throws DivergenceError naming the step on a
/// non-finite loss.
TrainResult train(TransformerParams init, const LabeledEncodings& train_set, const LabeledEncodings& val,
                  const EncoderConfig& cfg, const TrainConfig& tc,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

/// As above, starting from init_params(cfg, tc.seed).
TrainResult train(const LabeledEncodings& train_set, const LabeledEncodings& val, const EncoderConfig& cfg,
                  const TrainConfig& tc, const std::function<void(const EpochLog&)>& on_epoch = {});

/// Eval-mode prediction; scores are softmax probabilities.
std::vector<Prediction> predict(const TransformerParams& params, const EncoderConfig& cfg,
                                std::span<const Encoding> inputs);

std::vector<Prediction> predict_texts(const TransformerParams& params, const EncoderConfig& cfg,
                                      const Vocabulary& vocab, const std::vector<std::string>& texts);

/// On-disk model: 8-byte little-endian header length, a JSON header
/// ({format_version, encoder_config, train_config, vocab_ref, metadata,
/// tensors: [{name, shape, offset, length}]}), then every tensor in
/// for_each order as row-major little-endian float32. Offsets are relative
/// to the start of the payload.
struct TransformerModelFile {
  EncoderConfig encoder;
  TrainConfig train;
  nlohmann::json vocab_ref;
  nlohmann::json metadata;
  TransformerParams params;
};

void save_transformer(const TransformerModelFile& model, const std::filesystem::path& path);
TransformerModelFile load_transformer(const std::filesystem::path& path);

/// Rounds every parameter to float32, as a save/load round trip would.
TransformerParams round_to_float(const TransformerParams& params);

}  // namespace codemix
