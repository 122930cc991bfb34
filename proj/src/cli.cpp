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

#include "codemix/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "codemix/baselines.hpp"
#include "codemix/corpus.hpp"
#include "codemix/digest.hpp"
#include "codemix/error.hpp"
#include "codemix/features.hpp"
#include "codemix/metrics.hpp"
#include "codemix/text.hpp"
#include "codemix/tokenizer.hpp"
#include "codemix/transformer.hpp"

namespace codemix::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr std::size_t kDefaultVocabSize = 4000;

struct Options {
  std::vector<std::string> inputs;
  std::string label_map;
  std::string out_dir;
  std::string config;
  std::string model;
  std::string model_file;
  std::string split = "test";
  std::string checkpoint = "final";
  std::string predict_input;
  std::vector<std::string> texts;
  std::uint64_t seed = 0;
  bool json = false;
  bool keep_hashtag_text = false;
  bool no_stop_words = false;
};

// --- file helpers ----------------------------------------------------------

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw InputError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

Json file_ref(const fs::path& dir, const std::string& name) {
  return {{"path", name}, {"sha256", sha256_file(dir / name)}};
}

void check_ref(const fs::path& dir, const Json& ref, const std::string& what) {
  if (!ref.is_object() || !ref.contains("path") || !ref.contains("sha256")) {
    throw InputError("model file has no " + what + " reference");
  }
  const fs::path p = dir / ref.at("path").get<std::string>();
  if (!fs::exists(p)) throw InputError(what + " " + p.string() + " not found");
  if (sha256_file(p) != ref.at("sha256").get<std::string>()) {
    throw InputError(what + " " + p.string() + " does not match the model (digest mismatch)");
  }
}

fs::path dir_of(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

// --- configuration ---------------------------------------------------------

void check_keys(const Json& j, std::initializer_list<const char*> known, const std::string& what) {
  if (!j.is_object()) throw InputError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw InputError(what + ": unknown key \"" + key + "\"");
    }
  }
}

Json load_config(const Options& o) {
  if (o.config.empty()) return Json::object();
  Json j = read_json(o.config);
  check_keys(j, {"preprocess", "split", "tokenizer", "features", "nb", "svm", "encoder", "train"}, o.config);
  for (const auto& [key, value] : j.items()) {
    if (!value.is_object()) throw InputError(o.config + ": section \"" + key + "\" must be an object");
  }
  return j;
}

Json section(const Json& cfg, const char* name) { return cfg.contains(name) ? cfg.at(name) : Json::object(); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(what + ": invalid value for \"" + key + "\"");
  }
}

PreprocessConfig build_preprocess(const Options& o, const Json& sec) {
  check_keys(sec, {"emoji_lexicon", "stop_words", "fillers", "keep_hashtag_text", "remove_stop_words"},
             "config section preprocess");
  const fs::path base = o.config.empty() ? fs::path(".") : dir_of(o.config);
  const auto resolve = [&](const char* key) { return base / sec.at(key).get<std::string>(); };
  PreprocessConfig c;
  if (sec.contains("emoji_lexicon")) c.emoji_lexicon = load_emoji_lexicon(resolve("emoji_lexicon"));
  if (sec.contains("stop_words")) c.stop_words = load_word_list(resolve("stop_words"));
  if (sec.contains("fillers")) c.fillers = load_filler_list(resolve("fillers"));
  c.keep_hashtag_text = get_or<bool>(sec, "keep_hashtag_text", false, "preprocess") || o.keep_hashtag_text;
  c.remove_stop_words = get_or<bool>(sec, "remove_stop_words", true, "preprocess") && !o.no_stop_words;
  return c;
}

Fraction parse_fraction(const Json& j, const char* key, Fraction fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
    throw InputError(std::string("split.") + key + " must be [numerator, denominator]");
  }
  return {v[0].get<std::uint64_t>(), v[1].get<std::uint64_t>()};
}

const LabelMap& key_label_map() {
  static const LabelMap m = [] {
    LabelMap out;
    for (const auto l : kAllLabels) out.emplace(std::string(label_key(l)), l);
    return out;
  }();
  return m;
}

Corpus load_split(const fs::path& dir, const std::string& name) {
  const fs::path p = dir / (name + ".jsonl");
  if (!fs::exists(p)) throw InputError("split file " + p.string() + " not found; run prepare first");
  return load_corpus(p, CorpusFormat::Jsonl, key_label_map());
}

std::string model_file_name(const std::string& model, const std::string& checkpoint) {
  if (model == "transformer") return checkpoint == "best" ? "model.transformer.best.bin" : "model.transformer.bin";
  return "model." + model + ".json";
}

std::string display_name(const std::string& model) {
  if (model == "nb") return "Naive Bayes";
  if (model == "svm") return "SVM";
  if (model == "transformer") return "Transformer";
  return model;
}

Json manifest_base(const std::string& command, const Options& o) {
  return {{"pipeline_version", kPipelineVersion}, {"command", command}, {"seed", o.seed}};
}

// Models record the digest of the preprocess config so predict can repeat
// the cleaning steps.
Json preprocess_ref(const fs::path& dir) {
  if (!fs::exists(dir / "preprocess.json")) throw InputError("preprocess.json not found in " + dir.string());
  return file_ref(dir, "preprocess.json");
}

// --- prepare ---------------------------------------------------------------

int cmd_prepare(const Options& o, std::ostream& out, std::ostream& err) {
  const Json cfg = load_config(o);
  const PreprocessConfig pcfg = build_preprocess(o, section(cfg, "preprocess"));
  const Json split_sec = section(cfg, "split");
  check_keys(split_sec, {"train", "val"}, "config section split");
  SplitSpec spec;
  spec.train = parse_fraction(split_sec, "train", spec.train);
  spec.val = parse_fraction(split_sec, "val", spec.val);
  spec.seed = o.seed;
  spec.validate();

  const LabelMap labels = load_label_map(o.label_map);
  std::optional<Corpus> merged;
  Json inputs = Json::array();
  for (const auto& input : o.inputs) {
    const fs::path p(input);
    Corpus c = load_corpus(p, format_from_path(p), labels);
    inputs.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}, {"records", c.size()}});
    merged = merged ? merge(*merged, c) : std::move(c);
  }
  const PreprocessResult pre = preprocess_corpus(*merged, pcfg);
  if (pre.clean.empty()) throw InputError("no records survive preprocessing");
  const CorpusSplit parts = split(pre.clean, spec);
  for (const auto& w : parts.warnings) err << "warning: " << w << '\n';

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  save_corpus_jsonl(pre.clean, dir / "clean.jsonl");
  save_corpus_jsonl(parts.train, dir / "train.jsonl");
  save_corpus_jsonl(parts.val, dir / "val.jsonl");
  save_corpus_jsonl(parts.test, dir / "test.jsonl");
  const ClassDistribution dist = class_distribution(pre.clean);
  const std::string table = format_distribution(dist);
  write_file(dir / "distribution.txt", table);
  write_file(dir / "distribution.csv", distribution_csv(dist));
  const Json drops = {{"input_records", merged->size()},
                      {"kept", pre.clean.size()},
                      {"dropped",
                       {{"no_alpha", pre.dropped.no_alpha},
                        {"filler", pre.dropped.filler},
                        {"empty", pre.dropped.empty},
                        {"duplicate", pre.dropped.duplicate}}}};
  write_file(dir / "drops.json", pretty(drops));
  write_file(dir / "preprocess.json", pretty(preprocess_config_to_json(pcfg)));

  Json manifest = manifest_base("prepare", o);
  manifest["inputs"] = inputs;
  manifest["label_map"] = {{"path", fs::path(o.label_map).filename().string()},
                           {"sha256", sha256_file(o.label_map)}};
  manifest["config"] = {{"preprocess", {{"keep_hashtag_text", pcfg.keep_hashtag_text},
                                        {"remove_stop_words", pcfg.remove_stop_words}}},
                        {"split", {{"train", {spec.train.num, spec.train.den}}, {"val", {spec.val.num, spec.val.den}}}}};
  manifest["split_sizes"] = {{"train", parts.train.size()}, {"val", parts.val.size()}, {"test", parts.test.size()}};
  Json outputs = Json::array();
  for (const char* name : {"clean.jsonl", "train.jsonl", "val.jsonl", "test.jsonl", "distribution.txt",
                           "distribution.csv", "drops.json", "preprocess.json"}) {
    outputs.push_back(file_ref(dir, name));
  }
  manifest["outputs"] = outputs;
  write_file(dir / "manifest.prepare.json", pretty(manifest));

  out << table << '\n';
  out << "Records: " << merged->size() << " read, " << pre.clean.size() << " kept (dropped: no_alpha "
      << pre.dropped.no_alpha << ", filler " << pre.dropped.filler << ", empty " << pre.dropped.empty
      << ", duplicate " << pre.dropped.duplicate << ")\n";
  out << "Split: train " << parts.train.size() << ", val " << parts.val.size() << ", test " << parts.test.size()
      << '\n';
  return kExitOk;
}

// --- train -----------------------------------------------------------------

std::vector<SparseVector> featurize(const Corpus& c, const TermIndex& idx) {
  std::vector<SparseVector> x;
  x.reserve(c.size());
  for (const auto& r : c) x.push_back(tfidf_transform(r.text, idx));
  return x;
}

double accuracy_of(const std::vector<Prediction>& preds, const std::vector<SentimentLabel>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += preds[i].label == y[i] ? 1 : 0;
  return y.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(y.size());
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

int train_linear(const Options& o, const Json& cfg, std::ostream& out) {
  const fs::path dir(o.out_dir);
  const Corpus train_set = load_split(dir, "train");
  if (train_set.empty()) throw InputError("training split is empty");
  const Json fsec = section(cfg, "features");
  check_keys(fsec, {"min_df"}, "config section features");
  const auto min_df = get_or<std::size_t>(fsec, "min_df", 1, "features");
  const TermIndex idx = fit_term_index(train_set.texts(), min_df);
  save_term_index(idx, dir / "term_index.json");
  const auto x = featurize(train_set, idx);
  const auto y = train_set.labels();

  Json params;
  Json hyper;
  std::vector<Prediction> fitted;
  if (o.model == "nb") {
    const Json sec = section(cfg, "nb");
    check_keys(sec, {"alpha"}, "config section nb");
    const double alpha = get_or<double>(sec, "alpha", 1.0, "nb");
    const NaiveBayesModel m = nb_train(x, y, idx.size(), alpha);
    params = m.to_json();
    hyper = {{"alpha", alpha}};
    for (const auto& v : x) fitted.push_back(nb_predict(m, v));
  } else {
    const Json sec = section(cfg, "svm");
    check_keys(sec, {"lambda", "epochs"}, "config section svm");
    SvmHyper h;
    h.lambda = get_or<double>(sec, "lambda", h.lambda, "svm");
    h.epochs = get_or<std::size_t>(sec, "epochs", h.epochs, "svm");
    h.seed = o.seed;
    const LinearSvmModel m = svm_train(x, y, idx.size(), h);
    params = m.to_json();
    hyper = {{"lambda", h.lambda}, {"epochs", h.epochs}, {"seed", h.seed}};
    for (const auto& v : x) fitted.push_back(svm_predict(m, v));
  }

  const std::string model_name = model_file_name(o.model, "final");
  const Json envelope = {{"format_version", kFormatVersion},
                         {"model_type", o.model},
                         {"term_index_ref", file_ref(dir, "term_index.json")},
                         {"preprocess_ref", preprocess_ref(dir)},
                         {"parameters", params}};
  write_file(dir / model_name, envelope.dump() + "\n");

  std::ostringstream log;
  log << "model " << o.model << ": " << train_set.size() << " training records, " << idx.size() << " features\n";
  log << "train accuracy " << fixed(accuracy_of(fitted, y), 4) << '\n';
  const std::string log_name = "train." + o.model + ".log";
  write_file(dir / log_name, log.str());
  out << log.str();

  Json manifest = manifest_base("train", o);
  manifest["model"] = o.model;
  manifest["inputs"] = Json::array({file_ref(dir, "train.jsonl")});
  manifest["config"] = {{"features", {{"min_df", min_df}}}, {o.model, hyper}};
  manifest["outputs"] = Json::array({file_ref(dir, "term_index.json"), file_ref(dir, model_name), file_ref(dir, log_name)});
  write_file(dir / ("manifest.train." + o.model + ".json"), pretty(manifest));
  return kExitOk;
}

LabeledEncodings encode_corpus(const Corpus& c, const Vocabulary& vocab, const TokenizerConfig& tok) {
  LabeledEncodings out;
  out.inputs.reserve(c.size());
  for (const auto& r : c) {
    out.inputs.push_back(encode(r.text, vocab, tok));
    out.labels.push_back(r.label);
  }
  return out;
}

int train_transformer(const Options& o, const Json& cfg, std::ostream& out) {
  const fs::path dir(o.out_dir);
  const Corpus train_set = load_split(dir, "train");
  const Corpus val_set = load_split(dir, "val");
  if (train_set.empty()) throw InputError("training split is empty");

  const Json tsec = section(cfg, "tokenizer");
  check_keys(tsec, {"vocab_size", "max_len", "max_word_chars"}, "config section tokenizer");
  TokenizerConfig tok;
  tok.max_len = get_or<std::size_t>(tsec, "max_len", tok.max_len, "tokenizer");
  tok.max_word_chars = get_or<std::size_t>(tsec, "max_word_chars", tok.max_word_chars, "tokenizer");
  tok.validate();
  const auto target = get_or<std::size_t>(tsec, "vocab_size", kDefaultVocabSize, "tokenizer");
  const Vocabulary vocab = train_vocabulary(train_set.texts(), target, tok);
  save_vocabulary(vocab, dir / "vocab.txt");

  Json esec = section(cfg, "encoder");
  if (esec.contains("max_len") && esec.at("max_len") != tok.max_len) {
    throw InputError("encoder.max_len must match tokenizer.max_len");
  }
  if (esec.contains("vocab_size")) throw InputError("encoder.vocab_size is set by the trained vocabulary");
  EncoderConfig ecfg = EncoderConfig::from_json(esec);
  ecfg.vocab_size = vocab.size();
  ecfg.max_len = tok.max_len;
  ecfg.validate();
  TrainConfig tc = TrainConfig::from_json(section(cfg, "train"));
  tc.seed = o.seed;
  tc.validate();

  const LabeledEncodings tr = encode_corpus(train_set, vocab, tok);
  const LabeledEncodings va = encode_corpus(val_set, vocab, tok);
  std::ostringstream log;
  log << "model transformer: " << train_set.size() << " training records, " << val_set.size()
      << " validation records, vocabulary " << vocab.size() << '\n';
  out << log.str() << std::flush;
  Json epochs = Json::array();
  const TrainResult result = train(tr, va, ecfg, tc, [&](const EpochLog& e) {
    std::string line = "epoch " + std::to_string(e.epoch) + "/" + std::to_string(tc.epochs) +
                       " train_loss " + fixed(e.train_loss, 6);
    if (e.val_weighted_f1) line += " val_weighted_f1 " + fixed(*e.val_weighted_f1, 4);
    log << line << '\n';
    out << line << '\n' << std::flush;
    Json entry = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
    if (e.val_weighted_f1) entry["val_weighted_f1"] = *e.val_weighted_f1;
    epochs.push_back(entry);
  });
  log << "best epoch " << result.best_epoch << '\n';
  out << "best epoch " << result.best_epoch << '\n';

  TransformerModelFile file;
  file.encoder = ecfg;
  file.train = tc;
  file.vocab_ref = file_ref(dir, "vocab.txt");
  file.metadata = {{"preprocess_ref", preprocess_ref(dir)},
                   {"tokenizer", {{"max_len", tok.max_len}, {"max_word_chars", tok.max_word_chars}}},
                   {"epochs", epochs},
                   {"best_epoch", result.best_epoch}};
  file.metadata["checkpoint"] = "final";
  file.params = result.final_params;
  save_transformer(file, dir / model_file_name("transformer", "final"));
  file.metadata["checkpoint"] = "best";
  file.params = result.best_params;
  save_transformer(file, dir / model_file_name("transformer", "best"));
  write_file(dir / "train.transformer.log", log.str());

  Json manifest = manifest_base("train", o);
  manifest["model"] = "transformer";
  manifest["inputs"] = Json::array({file_ref(dir, "train.jsonl"), file_ref(dir, "val.jsonl")});
  manifest["config"] = {{"tokenizer",
                         {{"vocab_size", target}, {"max_len", tok.max_len}, {"max_word_chars", tok.max_word_chars}}},
                        {"encoder", ecfg.to_json()},
                        {"train", tc.to_json()}};
  manifest["outputs"] = Json::array({file_ref(dir, "vocab.txt"), file_ref(dir, model_file_name("transformer", "final")),
                                     file_ref(dir, model_file_name("transformer", "best")),
                                     file_ref(dir, "train.transformer.log")});
  write_file(dir / "manifest.train.transformer.json", pretty(manifest));
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  if (o.model == "transformer") return train_transformer(o, cfg, out);
  return train_linear(o, cfg, out);
}

// --- loaded models ---------------------------------------------------------

struct LoadedModel {
  std::string type;
  fs::path path;
  fs::path dir;
  Json preprocess_ref;
  std::optional<NaiveBayesModel> nb;
  std::optional<LinearSvmModel> svm;
  TermIndex terms;
  std::optional<TransformerModelFile> transformer;
  std::optional<Vocabulary> vocab;

  std::vector<Prediction> predict(const std::vector<std::string>& texts) const {
    std::vector<Prediction> out;
    if (transformer) return predict_texts(transformer->params, transformer->encoder, *vocab, texts);
    out.reserve(texts.size());
    for (const auto& t : texts) {
      const SparseVector x = tfidf_transform(t, terms);
      out.push_back(nb ? nb_predict(*nb, x) : svm_predict(*svm, x));
    }
    return out;
  }
};

LoadedModel load_model(const Options& o) {
  fs::path path;
  if (!o.model_file.empty()) {
    path = o.model_file;
  } else {
    if (o.model.empty()) throw InputError("give --model-file, or --model with --out-dir");
    path = fs::path(o.out_dir.empty() ? "." : o.out_dir) / model_file_name(o.model, o.checkpoint);
  }
  if (!fs::exists(path)) throw InputError("model file not found: " + path.string());
  LoadedModel m;
  m.path = path;
  m.dir = dir_of(path);
  const std::string head = read_file(path).substr(0, 1);
  if (head == "{") {
    const Json j = read_json(path);
    try {
      if (j.at("format_version") != kFormatVersion) throw InputError(path.string() + ": unsupported format_version");
      m.type = j.at("model_type").get<std::string>();
      check_ref(m.dir, j.at("term_index_ref"), "term index");
      m.terms = load_term_index(m.dir / j.at("term_index_ref").at("path").get<std::string>());
      m.preprocess_ref = j.value("preprocess_ref", Json());
      if (m.type == "nb") {
        m.nb = NaiveBayesModel::from_json(j.at("parameters"));
        if (m.nb->num_features() != m.terms.size()) throw InputError("term index size does not match the model");
      } else if (m.type == "svm") {
        m.svm = LinearSvmModel::from_json(j.at("parameters"));
        if (m.svm->num_features() != m.terms.size()) throw InputError("term index size does not match the model");
      } else {
        throw InputError(path.string() + ": unknown model_type \"" + m.type + "\"");
      }
    } catch (const Json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  } else {
    m.type = "transformer";
    m.transformer = load_transformer(path);
    check_ref(m.dir, m.transformer->vocab_ref, "vocabulary");
    m.vocab = load_vocabulary(m.dir / m.transformer->vocab_ref.at("path").get<std::string>());
    m.preprocess_ref = m.transformer->metadata.value("preprocess_ref", Json());
  }
  if (!o.model.empty() && o.model != m.type) {
    throw InputError(path.string() + " holds a " + m.type + " model, not " + o.model);
  }
  return m;
}

// --- evaluate --------------------------------------------------------------

int cmd_evaluate(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o);
  const Corpus data = load_split(m.dir, o.split);
  if (data.empty()) throw InputError("split " + o.split + " is empty");
  const auto preds = m.predict(data.texts());
  std::vector<SentimentLabel> y_pred;
  y_pred.reserve(preds.size());
  for (const auto& p : preds) y_pred.push_back(p.label);
  const EvalReport report = evaluate(data.labels(), y_pred);

  const fs::path out_dir = o.out_dir.empty() ? m.dir : fs::path(o.out_dir);
  fs::create_directories(out_dir);
  const std::string split_file = o.split + ".jsonl";
  Json result = {{"model", m.type},
                 {"split", o.split},
                 {"records", data.size()},
                 {"report", report.to_json()},
                 {"manifest",
                  {{"pipeline_version", kPipelineVersion},
                   {"model_file", {{"path", m.path.filename().string()}, {"sha256", sha256_file(m.path)}}},
                   {"split_file", file_ref(m.dir, split_file)}}}};
  if (m.transformer) result["checkpoint"] = m.transformer->metadata.value("checkpoint", "final");
  write_file(out_dir / ("eval." + m.type + "." + o.split + ".json"), pretty(result));
  if (o.json) {
    out << pretty(result);
  } else {
    out << display_name(m.type) << " on " << o.split << " (" << data.size() << " records)\n\n";
    out << format_report(report) << '\n' << per_class_f1_report(report);
  }
  return kExitOk;
}

// --- predict ---------------------------------------------------------------

int cmd_predict(const Options& o, std::istream& in, std::ostream& out) {
  if (o.texts.empty() && o.predict_input.empty()) throw InputError("predict needs --text or --input");
  const LoadedModel m = load_model(o);
  check_ref(m.dir, m.preprocess_ref, "preprocess config");
  const PreprocessConfig pcfg =
      preprocess_config_from_json(read_json(m.dir / m.preprocess_ref.at("path").get<std::string>()));

  std::vector<std::string> raw;
  for (const auto& t : o.texts) {
    if (!text::collapse_whitespace(t).empty()) raw.push_back(t);
  }
  if (!o.predict_input.empty()) {
    std::ifstream file;
    std::istream* src = &in;
    if (o.predict_input != "-") {
      file.open(o.predict_input, std::ios::binary);
      if (!file) throw InputError("cannot read " + o.predict_input);
      src = &file;
    }
    std::string line;
    while (std::getline(*src, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!text::collapse_whitespace(line).empty()) raw.push_back(line);
    }
  }
  if (raw.empty()) return kExitOk;

  std::vector<std::string> cleaned;
  cleaned.reserve(raw.size());
  for (const auto& t : raw) cleaned.push_back(clean_text(t, pcfg));
  const auto preds = m.predict(cleaned);
  const bool probabilities = m.type != "svm";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ClassScores s = preds[i].scores;
    if (m.type == "nb") {
      for (auto& v : s) v = std::exp(v);
    }
    if (o.json) {
      Json scores = Json::object();
      for (const auto l : kAllLabels) scores[std::string(label_key(l))] = s[label_id(l)];
      out << Json{{"text", raw[i]},
                  {"label", std::string(label_key(preds[i].label))},
                  {probabilities ? "probabilities" : "decision_scores", scores}}
                 .dump()
          << '\n';
    } else {
      out << label_name(preds[i].label) << '\t';
      for (const auto l : kAllLabels) {
        out << (l == SentimentLabel::Negative ? "" : " ") << label_key(l) << '=' << fixed(s[label_id(l)], 4);
      }
      out << '\n';
    }
  }
  return kExitOk;
}

// --- report ----------------------------------------------------------------

int cmd_report(const Options& o, std::ostream& out) {
  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  std::vector<fs::path> files;
  if (!o.inputs.empty()) {
    for (const auto& i : o.inputs) files.emplace_back(i);
  } else {
    for (const char* m : {"nb", "svm", "transformer"}) {
      const fs::path p = dir / ("eval." + std::string(m) + "." + o.split + ".json");
      if (fs::exists(p)) files.push_back(p);
    }
  }
  if (files.empty()) throw InputError("no evaluation reports found in " + dir.string());
  std::vector<std::pair<std::string, EvalReport>> reports;
  Json summary = Json::array();
  for (const auto& f : files) {
    const Json j = read_json(f);
    if (!j.contains("model") || !j.contains("report")) throw InputError(f.string() + ": not an evaluation report");
    const std::string model = j.at("model").get<std::string>();
    reports.emplace_back(display_name(model), EvalReport::from_json(j.at("report")));
    summary.push_back({{"model", model}, {"split", j.value("split", "")}, {"report", j.at("report")}});
  }
  const Comparison cmp = compare_models(reports);
  fs::create_directories(dir);
  write_file(dir / "comparison.txt", cmp.table);
  write_file(dir / "comparison.csv", cmp.csv);
  if (o.json) {
    out << pretty(summary);
  } else {
    out << cmp.table;
  }
  return kExitOk;
}

}  // namespace

// --- preprocess.json -------------------------------------------------------

nlohmann::json preprocess_config_to_json(const PreprocessConfig& cfg) {
  return {{"emoji_lexicon", cfg.emoji_lexicon.mapping()},
          {"stop_words", cfg.stop_words.words()},
          {"fillers", cfg.fillers.phrases()},
          {"keep_hashtag_text", cfg.keep_hashtag_text},
          {"remove_stop_words", cfg.remove_stop_words}};
}

PreprocessConfig preprocess_config_from_json(const nlohmann::json& j) {
  try {
    PreprocessConfig cfg;
    cfg.emoji_lexicon = EmojiLexicon(j.at("emoji_lexicon").get<std::map<std::string, std::string>>());
    cfg.stop_words = WordList(j.at("stop_words").get<std::set<std::string>>());
    cfg.fillers = FillerList(j.at("fillers").get<std::set<std::string>>());
    cfg.keep_hashtag_text = j.at("keep_hashtag_text").get<bool>();
    cfg.remove_stop_words = j.at("remove_stop_words").get<bool>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("preprocess config: ") + e.what());
  }
}

// --- entry point -----------------------------------------------------------

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment classification for code-mixed social-media text", "codemix"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kPipelineVersion);
  Options o;
  const auto models = CLI::IsMember({"nb", "svm", "transformer"});
  const auto splits = CLI::IsMember({"train", "val", "test"});
  const auto checkpoints = CLI::IsMember({"final", "best"});

  auto* prepare = app.add_subcommand("prepare", "Clean, deduplicate and split labeled corpora");
  prepare->add_option("--input", o.inputs, "Corpus file (.jsonl or .csv); repeatable")->required();
  prepare->add_option("--label-map", o.label_map, "JSON map from raw labels to negative/neutral/positive")
      ->required();
  prepare->add_option("--out-dir", o.out_dir, "Working directory for outputs")->required();
  prepare->add_option("--seed", o.seed, "Random seed");
  prepare->add_option("--config", o.config, "JSON configuration overrides");
  prepare->add_flag("--keep-hashtag-text", o.keep_hashtag_text, "Keep hashtag words, dropping only '#'");
  prepare->add_flag("--no-stop-words", o.no_stop_words, "Disable stop-word removal");

  auto* train_cmd = app.add_subcommand("train", "Train a model on the prepared train split");
  train_cmd->add_option("--model", o.model, "nb, svm or transformer")->required()->check(models);
  train_cmd->add_option("--out-dir", o.out_dir, "Working directory written by prepare")->required();
  train_cmd->add_option("--seed", o.seed, "Random seed");
  train_cmd->add_option("--config", o.config, "JSON configuration overrides");

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a trained model on a split");
  eval_cmd->add_option("--model", o.model, "nb, svm or transformer")->check(models);
  eval_cmd->add_option("--model-file", o.model_file, "Model file (overrides --model)");
  eval_cmd->add_option("--out-dir", o.out_dir, "Working directory");
  eval_cmd->add_option("--split", o.split, "train, val or test")->check(splits);
  eval_cmd->add_option("--checkpoint", o.checkpoint, "Transformer checkpoint: final or best")->check(checkpoints);
  eval_cmd->add_flag("--json", o.json, "Print the report as JSON");

  auto* predict_cmd = app.add_subcommand("predict", "Label new texts");
  predict_cmd->add_option("--model", o.model, "nb, svm or transformer")->check(models);
  predict_cmd->add_option("--model-file", o.model_file, "Model file (overrides --model)");
  predict_cmd->add_option("--out-dir", o.out_dir, "Working directory");
  predict_cmd->add_option("--checkpoint", o.checkpoint, "Transformer checkpoint: final or best")
      ->check(checkpoints);
  predict_cmd->add_option("--text", o.texts, "Text to label; repeatable");
  predict_cmd->add_option("--input", o.predict_input, "File with one text per line, or - for stdin");
  predict_cmd->add_flag("--json", o.json, "Print JSON lines");

  auto* report_cmd = app.add_subcommand("report", "Compare evaluated models");
  report_cmd->add_option("--out-dir", o.out_dir, "Working directory");
  report_cmd->add_option("--input", o.inputs, "Evaluation report files; repeatable");
  report_cmd->add_option("--split", o.split, "Split whose reports are compared")->check(splits);
  report_cmd->add_flag("--json", o.json, "Print JSON");

  try {
    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kPipelineVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  }

  try {
    if (prepare->parsed()) return cmd_prepare(o, out, err);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (eval_cmd->parsed()) return cmd_evaluate(o, out);
    if (predict_cmd->parsed()) return cmd_predict(o, in, out);
    if (report_cmd->parsed()) return cmd_report(o, out);
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace codemix::cli
