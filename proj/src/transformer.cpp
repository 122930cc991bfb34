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

#include "codemix/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "codemix/error.hpp"
#include "codemix/metrics.hpp"
#include "codemix/rng.hpp"

namespace codemix {
namespace {

using Eigen::VectorXd;
using Json = nlohmann::json;

constexpr int kFormatVersion = 1;

bool finite(const Matrix& m) { return m.allFinite(); }

std::vector<Matrix*> tensor_list(TransformerParams& p) {
  std::vector<Matrix*> out;
  p.for_each([&](const std::string&, Matrix& m, bool) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> tensor_list(const TransformerParams& p) {
  std::vector<const Matrix*> out;
  p.for_each([&](const std::string&, const Matrix& m, bool) { out.push_back(&m); });
  return out;
}

std::vector<bool> decay_flags(const TransformerParams& p) {
  std::vector<bool> out;
  p.for_each([&](const std::string&, const Matrix&, bool decayed) { out.push_back(decayed); });
  return out;
}

Matrix dropout_mask(Rng& rng, Eigen::Index rows, Eigen::Index cols, double p) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < p ? 0.0 : keep;
  return m;
}

Matrix add_bias(Matrix x, const Matrix& bias) {
  x.rowwise() += bias.row(0);
  return x;
}

Matrix affine_norm(const Matrix& xhat, const Matrix& gain, const Matrix& bias) {
  Matrix y = xhat.array().rowwise() * gain.row(0).array();
  y.rowwise() += bias.row(0);
  return y;
}

// d/dx of normalize_rows given d/dxhat.
Matrix normalize_rows_backward(const Matrix& dxhat, const Matrix& xhat, const VectorXd& inv_std) {
  const double d = static_cast<double>(xhat.cols());
  Matrix dx(xhat.rows(), xhat.cols());
  for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
    const double m1 = dxhat.row(r).sum() / d;
    const double m2 = dxhat.row(r).dot(xhat.row(r)) / d;
    dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2).matrix();
  }
  return dx;
}

void check_encoding(const Encoding& e, const EncoderConfig& cfg, std::size_t index) {
  const auto where = [&] { return "batch element " + std::to_string(index) + ": "; };
  if (e.ids.size() != cfg.max_len || e.attention_mask.size() != cfg.max_len) {
    throw InputError(where() + "expected length " + std::to_string(cfg.max_len) + ", got " +
                     std::to_string(e.ids.size()));
  }
  for (std::size_t i = 0; i < e.ids.size(); ++i) {
    if (e.ids[i] < 0 || static_cast<std::size_t>(e.ids[i]) >= cfg.vocab_size) {
      throw InputError(where() + "token id " + std::to_string(e.ids[i]) + " at position " + std::to_string(i) +
                       " is outside the vocabulary of size " + std::to_string(cfg.vocab_size));
    }
  }
  if (e.attention_mask[0] == 0) throw InputError(where() + "first position is masked");
}

void check_shapes(const TransformerParams& a, const TransformerParams& b, const char* what) {
  const auto ta = tensor_list(a);
  const auto tb = tensor_list(b);
  bool ok = ta.size() == tb.size();
  for (std::size_t i = 0; ok && i < ta.size(); ++i) {
    ok = ta[i]->rows() == tb[i]->rows() && ta[i]->cols() == tb[i]->cols();
  }
  if (!ok) throw InputError(std::string(what) + " shapes do not match the parameters");
}

ExampleCache forward_example(const TransformerParams& p, const EncoderConfig& cfg, const Encoding& e,
                             bool dropout_on, Rng& rng) {
  ExampleCache c;
  for (std::size_t i = 0; i < e.attention_mask.size(); ++i) {
    if (e.attention_mask[i] != 0) {
      c.positions.push_back(i);
      c.ids.push_back(e.ids[i]);
    }
  }
  const auto n = static_cast<Eigen::Index>(c.positions.size());
  const auto d = static_cast<Eigen::Index>(cfg.d_model);
  const auto dh = static_cast<Eigen::Index>(cfg.d_model / cfg.num_heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix x(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    x.row(r) = p.token_embedding.row(c.ids[r]) + p.position_embedding.row(static_cast<Eigen::Index>(c.positions[r]));
  }

  c.layers.resize(cfg.num_layers);
  for (std::size_t li = 0; li < cfg.num_layers; ++li) {
    const auto& w = p.layers[li];
    auto& lc = c.layers[li];
    lc.input = x;
    lc.q = add_bias(x * w.wq, w.bq);
    lc.k = add_bias(x * w.wk, w.bk);
    lc.v = add_bias(x * w.wv, w.bv);
    lc.context.resize(n, d);
    lc.attention.resize(cfg.num_heads);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
      const auto off = static_cast<Eigen::Index>(h) * dh;
      const Matrix scores = (lc.q.middleCols(off, dh) * lc.k.middleCols(off, dh).transpose()) * scale;
      lc.attention[h] = nn::softmax_rows(scores);
      lc.context.middleCols(off, dh) = lc.attention[h] * lc.v.middleCols(off, dh);
    }
    Matrix attn = add_bias(lc.context * w.wo, w.bo);
    if (dropout_on) {
      lc.attn_dropout = dropout_mask(rng, n, d, cfg.dropout);
      attn.array() *= lc.attn_dropout.array();
    }
    lc.xhat1 = nn::normalize_rows(x + attn, &lc.inv_std1);
    lc.hidden1 = affine_norm(lc.xhat1, w.ln1_gain, w.ln1_bias);

    lc.pre_act = add_bias(lc.hidden1 * w.w1, w.b1);
    lc.activated = lc.pre_act.unaryExpr([](double v) { return nn::gelu(v); });
    Matrix ffn = add_bias(lc.activated * w.w2, w.b2);
    if (dropout_on) {
      lc.ffn_dropout = dropout_mask(rng, n, d, cfg.dropout);
      ffn.array() *= lc.ffn_dropout.array();
    }
    lc.xhat2 = nn::normalize_rows(lc.hidden1 + ffn, &lc.inv_std2);
    x = affine_norm(lc.xhat2, w.ln2_gain, w.ln2_bias);
    if (!finite(x)) throw DivergenceError("non-finite activation in layer " + std::to_string(li));
  }
  c.output = x;
  c.cls = x.row(0);
  if (dropout_on) {
    c.cls_dropout = dropout_mask(rng, 1, d, cfg.dropout);
    c.cls.array() *= c.cls_dropout.array();
  }
  return c;
}

void backward_example(const TransformerParams& p, const EncoderConfig& cfg, const ExampleCache& c,
                      const Matrix& dlogits, TransformerParams& g) {
  const auto n = static_cast<Eigen::Index>(c.positions.size());
  const auto d = static_cast<Eigen::Index>(cfg.d_model);
  const auto dh = static_cast<Eigen::Index>(cfg.d_model / cfg.num_heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  g.head_weight.noalias() += c.cls.transpose() * dlogits;
  g.head_bias += dlogits;
  Matrix dcls = dlogits * p.head_weight.transpose();
  if (c.cls_dropout.size() != 0) dcls.array() *= c.cls_dropout.array();

  Matrix dx = Matrix::Zero(n, d);
  dx.row(0) = dcls;

  for (std::size_t li = cfg.num_layers; li-- > 0;) {
    const auto& w = p.layers[li];
    auto& gw = g.layers[li];
    const auto& lc = c.layers[li];

    // Second residual block.
    gw.ln2_gain += (dx.array() * lc.xhat2.array()).colwise().sum().matrix();
    gw.ln2_bias += dx.colwise().sum();
    const Matrix dr2 = normalize_rows_backward(dx.array().rowwise() * w.ln2_gain.row(0).array(), lc.xhat2,
                                               lc.inv_std2);
    Matrix dffn = dr2;
    if (lc.ffn_dropout.size() != 0) dffn.array() *= lc.ffn_dropout.array();
    gw.w2.noalias() += lc.activated.transpose() * dffn;
    gw.b2 += dffn.colwise().sum();
    Matrix dpre = dffn * w.w2.transpose();
    dpre.array() *= lc.pre_act.unaryExpr([](double v) { return nn::gelu_grad(v); }).array();
    gw.w1.noalias() += lc.hidden1.transpose() * dpre;
    gw.b1 += dpre.colwise().sum();
    Matrix dh1 = dr2 + dpre * w.w1.transpose();

    // First residual block.
    gw.ln1_gain += (dh1.array() * lc.xhat1.array()).colwise().sum().matrix();
    gw.ln1_bias += dh1.colwise().sum();
    const Matrix dr1 = normalize_rows_backward(dh1.array().rowwise() * w.ln1_gain.row(0).array(), lc.xhat1,
                                               lc.inv_std1);
    Matrix dattn = dr1;
    if (lc.attn_dropout.size() != 0) dattn.array() *= lc.attn_dropout.array();
    gw.wo.noalias() += lc.context.transpose() * dattn;
    gw.bo += dattn.colwise().sum();
    const Matrix dctx = dattn * w.wo.transpose();

    Matrix dq(n, d), dk(n, d), dv(n, d);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
      const auto off = static_cast<Eigen::Index>(h) * dh;
      const Matrix& a = lc.attention[h];
      const auto dout = dctx.middleCols(off, dh);
      dv.middleCols(off, dh) = a.transpose() * dout;
      const Matrix da = dout * lc.v.middleCols(off, dh).transpose();
      const VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
      Matrix ds = a.array() * (da.colwise() - row_dot).array();
      ds *= scale;
      dq.middleCols(off, dh) = ds * lc.k.middleCols(off, dh);
      dk.middleCols(off, dh) = ds.transpose() * lc.q.middleCols(off, dh);
    }
    gw.wq.noalias() += lc.input.transpose() * dq;
    gw.wk.noalias() += lc.input.transpose() * dk;
    gw.wv.noalias() += lc.input.transpose() * dv;
    gw.bq += dq.colwise().sum();
    gw.bk += dk.colwise().sum();
    gw.bv += dv.colwise().sum();
    dx = dr1 + dq * w.wq.transpose() + dk * w.wk.transpose() + dv * w.wv.transpose();
  }

  for (Eigen::Index r = 0; r < n; ++r) {
    g.token_embedding.row(c.ids[r]) += dx.row(r);
    g.position_embedding.row(static_cast<Eigen::Index>(c.positions[r])) += dx.row(r);
  }
}

// Row-wise log-sum-exp cross-entropy; fills probabilities.
double cross_entropy(const Matrix& logits, std::span<const SentimentLabel> labels, Matrix* probs) {
  double total = 0.0;
  if (probs != nullptr) probs->resize(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double top = logits.row(r).maxCoeff();
    const double lse = top + std::log((logits.row(r).array() - top).exp().sum());
    total += lse - logits(r, label_id(labels[static_cast<std::size_t>(r)]));
    if (probs != nullptr) probs->row(r) = (logits.row(r).array() - lse).exp().matrix();
  }
  return total / static_cast<double>(logits.rows());
}

void check_batch(std::span<const Encoding> batch, std::span<const SentimentLabel> labels) {
  if (batch.size() != labels.size()) {
    throw InputError("batch has " + std::to_string(batch.size()) + " inputs but " + std::to_string(labels.size()) +
                     " labels");
  }
  if (batch.empty()) throw InputError("empty batch");
}

std::size_t get_size(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw InputError(std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw InputError(std::string(key) + " must be a number");
  return v.get<double>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw InputError(std::string(what) + ": unknown key \"" + key + "\"");
    }
  }
}

void write_u64_le(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

std::uint32_t float_bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, sizeof u);
  return u;
}

float bits_float(std::uint32_t u) {
  float f;
  std::memcpy(&f, &u, sizeof f);
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

void EncoderConfig::validate() const {
  if (num_layers == 0 || num_heads == 0 || d_model == 0 || d_ff == 0 || max_len == 0 || vocab_size == 0) {
    throw InputError("encoder dimensions must be positive");
  }
  if (d_model % num_heads != 0) {
    throw InputError("d_model " + std::to_string(d_model) + " is not divisible by num_heads " +
                     std::to_string(num_heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("dropout must lie in [0, 1)");
  if (max_len < 3) throw InputError("max_len must be at least 3");
  if (vocab_size < 4) throw InputError("vocab_size must cover the four special tokens");
  if (num_classes != kNumLabels) throw InputError("num_classes must be 3");
}

Json EncoderConfig::to_json() const {
  return {{"num_layers", num_layers}, {"num_heads", num_heads}, {"d_model", d_model},
          {"d_ff", d_ff},             {"dropout", dropout},     {"max_len", max_len},
          {"vocab_size", vocab_size}, {"num_classes", num_classes}};
}

EncoderConfig EncoderConfig::from_json(const Json& j) {
  reject_unknown(j,
                 {"num_layers", "num_heads", "d_model", "d_ff", "dropout", "max_len", "vocab_size", "num_classes"},
                 "encoder config");
  EncoderConfig c;
  c.num_layers = get_size(j, "num_layers", c.num_layers);
  c.num_heads = get_size(j, "num_heads", c.num_heads);
  c.d_model = get_size(j, "d_model", c.d_model);
  c.d_ff = get_size(j, "d_ff", c.d_ff);
  c.dropout = get_real(j, "dropout", c.dropout);
  c.max_len = get_size(j, "max_len", c.max_len);
  c.vocab_size = get_size(j, "vocab_size", c.vocab_size);
  c.num_classes = get_size(j, "num_classes", c.num_classes);
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InputError("learning_rate must be positive");
  if (batch_size == 0) throw InputError("batch_size must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw InputError("weight_decay must be non-negative");
  }
}

Json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"weight_decay", weight_decay},
          {"warmup_steps", warmup_steps},
          {"seed", seed},
          {"schedule", schedule == LrSchedule::Constant ? "constant" : "linear"}};
}

TrainConfig TrainConfig::from_json(const Json& j) {
  reject_unknown(j, {"learning_rate", "epochs", "batch_size", "weight_decay", "warmup_steps", "seed", "schedule"},
                 "train config");
  TrainConfig c;
  c.learning_rate = get_real(j, "learning_rate", c.learning_rate);
  c.epochs = get_size(j, "epochs", c.epochs);
  c.batch_size = get_size(j, "batch_size", c.batch_size);
  c.weight_decay = get_real(j, "weight_decay", c.weight_decay);
  c.warmup_steps = get_size(j, "warmup_steps", c.warmup_steps);
  c.seed = get_size(j, "seed", c.seed);
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    if (s == "linear") {
      c.schedule = LrSchedule::LinearDecay;
    } else if (s == "constant") {
      c.schedule = LrSchedule::Constant;
    } else {
      throw InputError("schedule must be \"linear\" or \"constant\"");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Parameters.

TransformerParams TransformerParams::zeros(const EncoderConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(cfg.d_model);
  const auto f = static_cast<Eigen::Index>(cfg.d_ff);
  TransformerParams p;
  p.token_embedding = Matrix::Zero(static_cast<Eigen::Index>(cfg.vocab_size), d);
  p.position_embedding = Matrix::Zero(static_cast<Eigen::Index>(cfg.max_len), d);
  p.layers.resize(cfg.num_layers);
  for (auto& l : p.layers) {
    for (Matrix* m : {&l.wq, &l.wk, &l.wv, &l.wo}) *m = Matrix::Zero(d, d);
    for (Matrix* m : {&l.bq, &l.bk, &l.bv, &l.bo, &l.b2, &l.ln1_gain, &l.ln1_bias, &l.ln2_gain, &l.ln2_bias}) {
      *m = Matrix::Zero(1, d);
    }
    l.w1 = Matrix::Zero(d, f);
    l.b1 = Matrix::Zero(1, f);
    l.w2 = Matrix::Zero(f, d);
  }
  p.head_weight = Matrix::Zero(d, static_cast<Eigen::Index>(cfg.num_classes));
  p.head_bias = Matrix::Zero(1, static_cast<Eigen::Index>(cfg.num_classes));
  return p;
}

std::size_t TransformerParams::num_parameters() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Matrix& m, bool) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

bool TransformerParams::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const Matrix& m, bool) { ok = ok && m.allFinite(); });
  return ok;
}

bool TransformerParams::operator==(const TransformerParams& other) const {
  const auto a = tensor_list(*this);
  const auto b = tensor_list(other);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols()) return false;
    if (std::memcmp(a[i]->data(), b[i]->data(), sizeof(double) * static_cast<std::size_t>(a[i]->size())) != 0) {
      return false;
    }
  }
  return true;
}

TransformerParams init_params(const EncoderConfig& cfg, std::uint64_t seed) {
  TransformerParams p = TransformerParams::zeros(cfg);
  Rng rng(seed);
  p.for_each([&](const std::string& name, Matrix& m, bool decayed) {
    if (decayed) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, 0.02);
    } else if (name.ends_with(".gain")) {
      m.setOnes();
    }
  });
  return p;
}

void zero_head(TransformerParams& params) {
  params.head_weight.setZero();
  params.head_bias.setZero();
}

// ---------------------------------------------------------------------------
// Primitives.

namespace nn {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double top = scores.row(r).maxCoeff();
    out.row(r) = (scores.row(r).array() - top).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Matrix normalize_rows(const Matrix& x, VectorXd* inv_std) {
  const double d = static_cast<double>(x.cols());
  Matrix out(x.rows(), x.cols());
  if (inv_std != nullptr) inv_std->resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / d;
    const auto centered = (x.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / d;
    const double s = 1.0 / std::sqrt(var + kLayerNormEps);
    out.row(r) = centered * s;
    if (inv_std != nullptr) (*inv_std)(r) = s;
  }
  return out;
}

}  // namespace nn

// ---------------------------------------------------------------------------
// Forward and backward.

ForwardResult forward(const TransformerParams& params, const EncoderConfig& cfg, std::span<const Encoding> batch,
                      bool train_mode, std::uint64_t seed) {
  cfg.validate();
  for (std::size_t i = 0; i < batch.size(); ++i) check_encoding(batch[i], cfg, i);
  ForwardResult out;
  out.logits.resize(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(cfg.num_classes));
  out.cache.reserve(batch.size());
  const bool dropout_on = train_mode && cfg.dropout > 0.0;
  Rng rng(seed);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out.cache.push_back(forward_example(params, cfg, batch[b], dropout_on, rng));
    out.logits.row(static_cast<Eigen::Index>(b)) = out.cache.back().cls * params.head_weight + params.head_bias;
  }
  if (!finite(out.logits)) throw DivergenceError("non-finite logits");
  return out;
}

LossResult loss_and_grads(const TransformerParams& params, const EncoderConfig& cfg, std::span<const Encoding> batch,
                          std::span<const SentimentLabel> labels, bool train_mode, std::uint64_t seed) {
  check_batch(batch, labels);
  ForwardResult fwd = forward(params, cfg, batch, train_mode, seed);
  LossResult out;
  Matrix probs;
  out.loss = cross_entropy(fwd.logits, labels, &probs);
  if (!std::isfinite(out.loss)) throw DivergenceError("non-finite loss");
  out.grads = TransformerParams::zeros(cfg);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    Matrix dlogits = probs.row(static_cast<Eigen::Index>(b));
    dlogits(0, label_id(labels[b])) -= 1.0;
    dlogits *= inv_b;
    backward_example(params, cfg, fwd.cache[b], dlogits, out.grads);
  }
  out.logits = std::move(fwd.logits);
  return out;
}

double loss_only(const TransformerParams& params, const EncoderConfig& cfg, std::span<const Encoding> batch,
                 std::span<const SentimentLabel> labels, bool train_mode, std::uint64_t seed) {
  check_batch(batch, labels);
  const ForwardResult fwd = forward(params, cfg, batch, train_mode, seed);
  return cross_entropy(fwd.logits, labels, nullptr);
}

// ---------------------------------------------------------------------------
// Optimization.

double lr_schedule(std::size_t step, const TrainConfig& tc, std::size_t total_steps) {
  const double lr = tc.learning_rate;
  if (tc.warmup_steps > 0 && step < tc.warmup_steps) {
    return lr * static_cast<double>(step) / static_cast<double>(tc.warmup_steps);
  }
  if (tc.schedule == LrSchedule::Constant || total_steps <= tc.warmup_steps) return lr;
  if (step >= total_steps) return 0.0;
  return lr * static_cast<double>(total_steps - step) / static_cast<double>(total_steps - tc.warmup_steps);
}

AdamState AdamState::zeros(const EncoderConfig& cfg) {
  AdamState s;
  s.m = TransformerParams::zeros(cfg);
  s.v = TransformerParams::zeros(cfg);
  return s;
}

void adamw_step(TransformerParams& params, const TransformerParams& grads, AdamState& state, const TrainConfig& tc,
                double lr) {
  check_shapes(params, grads, "gradient");
  check_shapes(params, state.m, "first-moment");
  check_shapes(params, state.v, "second-moment");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(kAdamBeta1, t);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, t);
  auto p = tensor_list(params);
  const auto g = tensor_list(grads);
  auto m = tensor_list(state.m);
  auto v = tensor_list(state.v);
  const auto decayed = decay_flags(params);
  const double decay = lr * tc.weight_decay;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i]->array() = kAdamBeta1 * m[i]->array() + (1.0 - kAdamBeta1) * g[i]->array();
    v[i]->array() = kAdamBeta2 * v[i]->array() + (1.0 - kAdamBeta2) * g[i]->array().square();
    const auto update = (m[i]->array() / bc1) / ((v[i]->array() / bc2).sqrt() + kAdamEps);
    if (decayed[i]) {
      p[i]->array() -= lr * update + decay * p[i]->array();
    } else {
      p[i]->array() -= lr * update;
    }
  }
  if (!params.all_finite()) {
    throw DivergenceError("non-finite parameter after optimizer step " + std::to_string(state.step));
  }
}

// ---------------------------------------------------------------------------
// Training and prediction.

TrainResult train(TransformerParams init, const LabeledEncodings& train_set, const LabeledEncodings& val,
                  const EncoderConfig& cfg, const TrainConfig& tc,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  tc.validate();
  if (train_set.inputs.size() != train_set.labels.size() || val.inputs.size() != val.labels.size()) {
    throw InputError("inputs and labels differ in length");
  }
  check_shapes(init, TransformerParams::zeros(cfg), "initial parameter");
  TrainResult result;
  result.final_params = std::move(init);
  result.best_params = result.final_params;
  if (tc.epochs == 0) return result;
  if (train_set.inputs.empty()) throw InputError("training split is empty");

  const std::size_t n = train_set.inputs.size();
  const std::size_t per_epoch = (n + tc.batch_size - 1) / tc.batch_size;
  const std::size_t total_steps = per_epoch * tc.epochs;
  AdamState state = AdamState::zeros(cfg);
  Rng order_rng(mix_seed(tc.seed, std::numeric_limits<std::uint64_t>::max()));
  std::vector<std::size_t> order(n);
  std::vector<Encoding> batch;
  std::vector<SentimentLabel> labels;
  std::optional<double> best_f1;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    order_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += tc.batch_size) {
      const std::size_t end = std::min(n, start + tc.batch_size);
      batch.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set.inputs[order[i]]);
        labels.push_back(train_set.labels[order[i]]);
      }
      LossResult lr_out;
      try {
        lr_out = loss_and_grads(result.final_params, cfg, batch, labels, true, mix_seed(tc.seed, step));
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at step " + std::to_string(step) + ": " + e.what());
      }
      loss_sum += lr_out.loss * static_cast<double>(end - start);
      try {
        adamw_step(result.final_params, lr_out.grads, state, tc, lr_schedule(step, tc, total_steps));
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at step " + std::to_string(step) + ": " + e.what());
      }
      ++step;
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(n);
    if (!val.inputs.empty()) {
      const auto preds = predict(result.final_params, cfg, val.inputs);
      std::vector<SentimentLabel> y_pred;
      y_pred.reserve(preds.size());
      for (const auto& p : preds) y_pred.push_back(p.label);
      log.val_weighted_f1 = evaluate(val.labels, y_pred).weighted.f1;
      if (!best_f1 || *log.val_weighted_f1 > *best_f1) {
        best_f1 = log.val_weighted_f1;
        result.best_params = result.final_params;
        result.best_epoch = epoch;
      }
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  if (val.inputs.empty()) {
    result.best_params = result.final_params;
    result.best_epoch = tc.epochs;
  }
  return result;
}

TrainResult train(const LabeledEncodings& train_set, const LabeledEncodings& val, const EncoderConfig& cfg,
                  const TrainConfig& tc, const std::function<void(const EpochLog&)>& on_epoch) {
  return train(init_params(cfg, tc.seed), train_set, val, cfg, tc, on_epoch);
}

std::vector<Prediction> predict(const TransformerParams& params, const EncoderConfig& cfg,
                                std::span<const Encoding> inputs) {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  // Small chunks bound the size of the activation cache.
  constexpr std::size_t kChunk = 32;
  for (std::size_t start = 0; start < inputs.size(); start += kChunk) {
    const auto chunk = inputs.subspan(start, std::min(kChunk, inputs.size() - start));
    const ForwardResult fwd = forward(params, cfg, chunk, false);
    const Matrix probs = nn::softmax_rows(fwd.logits);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      Prediction p;
      for (std::size_t c = 0; c < kNumLabels; ++c) p.scores[c] = probs(r, static_cast<Eigen::Index>(c));
      p.label = argmax_label(p.scores);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Prediction> predict_texts(const TransformerParams& params, const EncoderConfig& cfg,
                                      const Vocabulary& vocab, const std::vector<std::string>& texts) {
  if (vocab.size() != cfg.vocab_size) {
    throw InputError("vocabulary has " + std::to_string(vocab.size()) + " tokens but the model expects " +
                     std::to_string(cfg.vocab_size));
  }
  TokenizerConfig tok;
  tok.max_len = cfg.max_len;
  std::vector<Encoding> enc;
  enc.reserve(texts.size());
  for (const auto& t : texts) enc.push_back(encode(t, vocab, tok));
  return predict(params, cfg, enc);
}

// ---------------------------------------------------------------------------
// Model file.

TransformerParams round_to_float(const TransformerParams& params) {
  TransformerParams out = params;
  out.for_each([](const std::string&, Matrix& m, bool) {
    m = m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
  });
  return out;
}

void save_transformer(const TransformerModelFile& model, const std::filesystem::path& path) {
  model.encoder.validate();
  check_shapes(model.params, TransformerParams::zeros(model.encoder), "model");
  Json tensors = Json::array();
  std::uint64_t offset = 0;
  model.params.for_each([&](const std::string& name, const Matrix& m, bool) {
    const std::uint64_t length = static_cast<std::uint64_t>(m.size()) * 4;
    tensors.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}, {"offset", offset}, {"length", length}});
    offset += length;
  });
  const Json header = {{"format_version", kFormatVersion},
                       {"model_type", "transformer"},
                       {"encoder_config", model.encoder.to_json()},
                       {"train_config", model.train.to_json()},
                       {"vocab_ref", model.vocab_ref},
                       {"metadata", model.metadata.is_null() ? Json::object() : model.metadata},
                       {"tensors", tensors}};
  const std::string text = header.dump();

  std::string payload;
  payload.reserve(offset);
  bool ok = true;
  model.params.for_each([&](const std::string&, const Matrix& m, bool) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const float f = static_cast<float>(m.data()[i]);
      ok = ok && std::isfinite(f);
      const std::uint32_t u = float_bits(f);
      for (int k = 0; k < 4; ++k) payload.push_back(static_cast<char>((u >> (8 * k)) & 0xFF));
    }
  });
  if (!ok) throw DivergenceError("parameters are not representable as finite 32-bit floats");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError(path.string() + ": cannot open for writing");
  write_u64_le(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!os) throw InputError(path.string() + ": write failed");
}

TransformerModelFile load_transformer(const std::filesystem::path& path) {
  const auto fail = [&](const std::string& msg) { return InputError(path.string() + ": " + msg); };
  std::ifstream is(path, std::ios::binary);
  if (!is) throw fail("cannot open model file");
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8) throw fail("truncated model file");
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i) hlen |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  if (hlen > bytes.size() - 8) throw fail("header length exceeds file size");

  TransformerModelFile model;
  std::map<std::string, Json> entries;
  try {
    const Json header = Json::parse(bytes.substr(8, hlen));
    if (header.at("format_version") != kFormatVersion) throw fail("unsupported format_version");
    if (header.contains("model_type") && header.at("model_type") != "transformer") {
      throw fail("not a transformer model file");
    }
    model.encoder = EncoderConfig::from_json(header.at("encoder_config"));
    model.train = TrainConfig::from_json(header.at("train_config"));
    model.vocab_ref = header.value("vocab_ref", Json());
    model.metadata = header.value("metadata", Json::object());
    for (const auto& t : header.at("tensors")) entries[t.at("name").get<std::string>()] = t;
  } catch (const Json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }
  try {
    model.encoder.validate();
  } catch (const InputError& e) {
    throw fail(e.what());
  }

  model.params = TransformerParams::zeros(model.encoder);
  const std::string_view payload(bytes.data() + 8 + hlen, bytes.size() - 8 - hlen);
  std::uint64_t expected = 0;
  model.params.for_each([&](const std::string& name, Matrix& m, bool) {
    const auto it = entries.find(name);
    if (it == entries.end()) throw fail("missing tensor " + name);
    const Json& t = it->second;
    const auto rows = t.at("shape").at(0).get<Eigen::Index>();
    const auto cols = t.at("shape").at(1).get<Eigen::Index>();
    if (rows != m.rows() || cols != m.cols()) throw fail("tensor " + name + " has the wrong shape");
    const auto off = t.at("offset").get<std::uint64_t>();
    const auto len = t.at("length").get<std::uint64_t>();
    if (len != static_cast<std::uint64_t>(m.size()) * 4 || off > payload.size() || len > payload.size() - off) {
      throw fail("tensor " + name + " has an invalid byte range");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint32_t u = 0;
      for (int k = 0; k < 4; ++k) {
        u |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[off + 4 * i + k])) << (8 * k);
      }
      m.data()[i] = static_cast<double>(bits_float(u));
    }
    expected += len;
  });
  if (entries.size() != tensor_list(model.params).size()) throw fail("unexpected extra tensors");
  if (expected != payload.size()) throw fail("payload size does not match the tensor table");
  if (!model.params.all_finite()) throw fail("non-finite parameter values");
  return model;
}

}  // namespace codemix
