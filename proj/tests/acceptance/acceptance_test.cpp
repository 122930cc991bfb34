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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "codemix/baselines.hpp"
#include "codemix/cli.hpp"
#include "codemix/features.hpp"
#include "codemix/metrics.hpp"
#include "codemix/preprocess.hpp"
#include "codemix/rng.hpp"
#include "codemix/tokenizer.hpp"
#include "codemix/transformer.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using codemix::SentimentLabel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const fs::path& p) {
  const std::string s = read_file(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path data_path(const std::string& name) { return fs::path(CODEMIX_TEST_DATA_DIR) / name; }

class Scratch {
 public:
  Scratch() : path_(fs::temp_directory_path() / "codemix_acceptance") {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Runs the CLI in-process; throws with stderr on a nonzero exit.
std::string cli(std::vector<std::string> args) {
  args.insert(args.begin(), "codemix");
  std::istringstream in;
  std::ostringstream out, err;
  const int code = codemix::cli::run(args, in, out, err);
  if (code != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += a + " ";
    throw std::runtime_error(cmd + "exited " + std::to_string(code) + ": " + err.str());
  }
  return out.str();
}

std::string prepare(const fs::path& corpus, const fs::path& labels, const fs::path& work, std::uint64_t seed,
                    const fs::path& config = {}) {
  std::vector<std::string> args = {"prepare",     "--input",         corpus.string(),
                                   "--label-map", labels.string(),   "--out-dir",
                                   work.string(), "--seed",          std::to_string(seed)};
  if (!config.empty()) {
    args.push_back("--config");
    args.push_back(config.string());
  }
  return cli(args);
}

// Criteria 1 and 2 share one prepare run over 24,111 records.
struct ReferenceCorpusRun {
  double prepare_seconds = 0.0;
  fs::path work;
};

ReferenceCorpusRun run_reference_corpus(const Scratch& s) {
  const fs::path dir = s.path() / "reference";
  fs::create_directories(dir);
  // Negative / Neutral / Positive.
  codemix::synthetic::write_jsonl(dir / "corpus.jsonl", codemix::synthetic::counted({7184, 8987, 7940}));
  codemix::synthetic::write_label_map(dir / "labels.json");
  ReferenceCorpusRun r;
  r.work = dir / "work";
  const auto t0 = Clock::now();
  prepare(dir / "corpus.jsonl", dir / "labels.json", r.work, 0);
  r.prepare_seconds = seconds_since(t0);
  return r;
}

Outcome criterion_split(const ReferenceCorpusRun& r) {
  const std::size_t train = count_lines(r.work / "train.jsonl");
  const std::size_t val = count_lines(r.work / "val.jsonl");
  const std::size_t test = count_lines(r.work / "test.jsonl");
  Outcome o;
  o.pass = train == 19288 && val == 2411 && test == 2412 && r.prepare_seconds < 5.0;
  o.detail = std::to_string(train) + "/" + std::to_string(val) + "/" + std::to_string(test) + " in " +
             fmt("%.2f", r.prepare_seconds) + " s";
  return o;
}

Outcome criterion_distribution(const ReferenceCorpusRun& r) {
  const std::string table = read_file(r.work / "distribution.txt");
  // Returns the row's count and percentage columns, or "" when absent.
  const auto row = [&](const std::string& name) -> std::pair<std::string, std::string> {
    std::istringstream lines(table);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind(name + " ", 0) != 0) continue;
      std::istringstream cols(line);
      std::string label, id, count, pct;
      cols >> label >> id >> count >> pct;
      return {count, pct};
    }
    return {};
  };
  const auto neu = row("Neutral");
  const auto pos = row("Positive");
  const auto neg = row("Negative");
  Outcome o;
  o.pass = neu == std::pair<std::string, std::string>{"8,987", "37.3%"} &&
           pos == std::pair<std::string, std::string>{"7,940", "32.9%"} &&
           neg == std::pair<std::string, std::string>{"7,184", "29.8%"};
  o.detail = "Neutral " + neu.first + " " + neu.second + ", Positive " + pos.first + " " + pos.second +
             ", Negative " + neg.first + " " + neg.second;
  return o;
}

Outcome criterion_tokenizer() {
  const codemix::Vocabulary v = codemix::load_vocabulary(data_path("vocab_fixture.txt"));
  const auto pieces = codemix::tokenize_word("likhna", v);
  const codemix::Encoding e = codemix::encode("likhna", v);
  Outcome o;
  o.pass = v.size() == 7 && pieces == std::vector<std::string>{"li", "##kh", "##na"} &&
           codemix::decode(e, v) == "likhna";
  std::string joined;
  for (const auto& p : pieces) joined += (joined.empty() ? "" : " ") + p;
  o.detail = "likhna -> [" + joined + "] -> " + codemix::decode(e, v);
  return o;
}

Outcome criterion_golden() {
  std::ifstream in(data_path("golden_preprocess.jsonl"));
  const codemix::PreprocessConfig cfg;
  std::size_t cases = 0;
  std::size_t ok = 0;
  std::string first_failure;
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto input = j.at("input").get<std::string>();
    const auto got = codemix::preprocess_text(input, cfg);
    bool good;
    if (j.at("expected").is_null()) {
      good = !got.has_value();
    } else {
      good = got.has_value() && *got == j.at("expected").get<std::string>() &&
             codemix::preprocess_text(*got, cfg) == got;
    }
    ++cases;
    if (good) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = "; first failure: " + input;
    }
  }
  Outcome o;
  o.pass = cases == 20 && ok == cases;
  o.detail = std::to_string(ok) + "/" + std::to_string(cases) + " cases" + first_failure;
  return o;
}

// Counts every quantity directly from the label vectors.
bool metrics_match_oracle(const std::vector<SentimentLabel>& t, const std::vector<SentimentLabel>& p) {
  const codemix::EvalReport r = codemix::evaluate(t, p);
  const std::size_t n = t.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += t[i] == p[i];
  bool same = r.accuracy == static_cast<double>(correct) / static_cast<double>(n);
  double wp = 0.0, wf = 0.0;
  for (const auto c : codemix::kAllLabels) {
    std::size_t tp = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += t[i] == c && p[i] == c;
      predicted += p[i] == c;
      actual += t[i] == c;
    }
    const double prec = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    const double rec = actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
    const double f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    const auto& m = r.per_class[codemix::label_id(c)];
    same = same && m.support == actual && m.precision == prec && m.recall == rec && m.f1 == f1;
    const double w = static_cast<double>(actual) / static_cast<double>(n);
    wp += w * prec;
    wf += w * f1;
  }
  same = same && r.weighted.precision == wp && r.weighted.f1 == wf && r.weighted.recall == r.accuracy;
  return same;
}

Outcome criterion_metrics() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20260501);
  std::uniform_int_distribution<std::size_t> len(1, 1000);
  std::uniform_int_distribution<int> lab(0, 2);
  std::size_t agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SentimentLabel> t, p;
    for (std::size_t i = len(gen); i > 0; --i) {
      t.push_back(codemix::label_from_id(lab(gen)));
      p.push_back(lab(gen) == 0 ? t.back() : codemix::label_from_id(lab(gen)));
    }
    agree += metrics_match_oracle(t, p);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = agree == 1000 && secs < 10.0;
  o.detail = std::to_string(agree) + "/1000 exact agreements in " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion_nb() {
  // Features: 0 = bad, 1 = good, 2 = movie.
  const std::vector<codemix::SparseVector> X = {codemix::SparseVector({{1, 1.0}, {2, 1.0}}),
                                                codemix::SparseVector({{0, 1.0}, {2, 1.0}})};
  const std::vector<SentimentLabel> y = {SentimentLabel::Positive, SentimentLabel::Negative};
  const auto m = codemix::nb_train(X, y, 3, 1.0);
  const double pos = std::exp(m.feature_log_likelihood[codemix::label_id(SentimentLabel::Positive)][1]);
  const double neg = std::exp(m.feature_log_likelihood[codemix::label_id(SentimentLabel::Negative)][1]);
  Outcome o;
  o.pass = std::abs(pos - 0.4) <= 1e-12 && std::abs(neg - 0.2) <= 1e-12;
  o.detail = "P(good|pos) " + fmt("%.15f", pos) + ", P(good|neg) " + fmt("%.15f", neg);
  return o;
}

Outcome criterion_tfidf() {
  const codemix::TermIndex idx = codemix::fit_term_index({"a b", "a"});
  const codemix::SparseVector v = codemix::tfidf_transform("a b", idx);
  Outcome o;
  if (v.size() != 2) {
    o.detail = "expected two weights";
    return o;
  }
  const double wa = v.entries()[0].second;
  const double wb = v.entries()[1].second;
  const double idf_b = std::log(3.0 / 2.0) + 1.0;
  const double norm = std::sqrt(1.0 + idf_b * idf_b);
  o.pass = std::abs(wa - 0.580) <= 1e-3 && std::abs(wb - 0.815) <= 1e-3 && std::abs(wa - 1.0 / norm) <= 1e-12 &&
           std::abs(wb - idf_b / norm) <= 1e-12;
  o.detail = "(" + fmt("%.6f", wa) + ", " + fmt("%.6f", wb) + ")";
  return o;
}

codemix::Encoding make_encoding(const std::vector<codemix::TokenId>& body, std::size_t max_len) {
  codemix::Encoding e;
  e.ids = {codemix::kClsId};
  e.ids.insert(e.ids.end(), body.begin(), body.end());
  e.ids.push_back(codemix::kSepId);
  e.num_real = e.ids.size();
  e.attention_mask.assign(e.num_real, 1);
  e.ids.resize(max_len, codemix::kPadId);
  e.attention_mask.resize(max_len, 0);
  return e;
}

std::vector<codemix::Encoding> random_encodings(std::mt19937_64& gen, const codemix::EncoderConfig& cfg,
                                                std::size_t n) {
  std::uniform_int_distribution<std::size_t> len(1, cfg.max_len - 2);
  std::uniform_int_distribution<codemix::TokenId> tok(4, static_cast<codemix::TokenId>(cfg.vocab_size) - 1);
  std::vector<codemix::Encoding> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<codemix::TokenId> body(len(gen));
    for (auto& t : body) t = tok(gen);
    out.push_back(make_encoding(body, cfg.max_len));
  }
  return out;
}

Outcome criterion_gradient() {
  const auto t0 = Clock::now();
  codemix::EncoderConfig cfg;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.d_model = 8;
  cfg.d_ff = 16;
  cfg.max_len = 12;
  cfg.vocab_size = 30;
  cfg.dropout = 0.0;
  std::mt19937_64 gen(8);
  const auto batch = random_encodings(gen, cfg, 4);
  const std::vector<SentimentLabel> labels = {SentimentLabel::Negative, SentimentLabel::Neutral,
                                              SentimentLabel::Positive, SentimentLabel::Neutral};
  // Weights well above the default scale so gradients dominate rounding.
  codemix::TransformerParams params = codemix::init_params(cfg, 3);
  codemix::Rng rng(4);
  params.for_each([&](const std::string& name, codemix::Matrix& m, bool) {
    const double base = name.ends_with(".gain") ? 1.0 : 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = base + rng.normal(0.0, 0.4);
  });
  const auto analytic = codemix::loss_and_grads(params, cfg, batch, labels);
  std::vector<const codemix::Matrix*> grads;
  analytic.grads.for_each([&](const std::string&, const codemix::Matrix& m, bool) { grads.push_back(&m); });
  const double h = 1e-5;
  // Relative error per entry; the 1e-6 floor on the denominator covers
  // gradients that are exactly zero (the attention key bias), where only
  // finite-difference rounding remains.
  double max_rel = 0.0;
  std::size_t k = 0;
  std::size_t checked = 0;
  params.for_each([&](const std::string&, codemix::Matrix& m, bool) {
    const codemix::Matrix& g = *grads[k++];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double orig = m.data()[i];
      m.data()[i] = orig + h;
      const double up = codemix::loss_only(params, cfg, batch, labels);
      m.data()[i] = orig - h;
      const double down = codemix::loss_only(params, cfg, batch, labels);
      m.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double diff = std::abs(numeric - g.data()[i]);
      max_rel = std::max(max_rel, diff / std::max({std::abs(numeric), std::abs(g.data()[i]), 1e-6}));
      ++checked;
    }
  });
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = max_rel < 1e-4 && secs < 60.0;
  o.detail = std::to_string(checked) + " parameters, max relative error " + fmt("%.2e", max_rel) + " in " +
             fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion_overfit() {
  codemix::EncoderConfig cfg;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.d_model = 16;
  cfg.d_ff = 32;
  cfg.max_len = 8;
  cfg.vocab_size = 40;
  cfg.dropout = 0.0;
  std::mt19937_64 gen(42);
  codemix::LabeledEncodings data;
  data.inputs = random_encodings(gen, cfg, 16);
  for (std::size_t i = 0; i < 16; ++i) data.labels.push_back(codemix::label_from_id(static_cast<long>(i % 3)));

  codemix::TransformerParams zero = codemix::init_params(cfg, 0);
  codemix::zero_head(zero);
  const double init_loss = codemix::loss_only(zero, cfg, data.inputs, data.labels);

  codemix::TrainConfig tc;
  tc.learning_rate = 5e-3;
  tc.epochs = 200;
  tc.batch_size = 4;
  tc.weight_decay = 0.0;
  tc.warmup_steps = 10;
  tc.seed = 1;
  const auto result = codemix::train(data, codemix::LabeledEncodings{}, cfg, tc);
  const auto preds = codemix::predict(result.final_params, cfg, data.inputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i].label == data.labels[i];
  Outcome o;
  o.pass = correct == 16 && std::abs(init_loss - std::log(3.0)) <= 1e-9;
  o.detail = "train accuracy " + std::to_string(correct) + "/16 after 200 epochs, zero-head loss " +
             fmt("%.12f", init_loss);
  return o;
}

// Writes the fixture configuration used for criteria 10 and 11.
void write_fixture_config(const fs::path& path) {
  const nlohmann::json cfg = {
      {"split", {{"train", {6, 10}}, {"val", {2, 10}}}},
      {"svm", {{"lambda", 1e-3}, {"epochs", 100}}},
      {"tokenizer", {{"vocab_size", 300}, {"max_len", 16}}},
      {"encoder", {{"num_layers", 2}, {"num_heads", 4}, {"d_model", 64}, {"d_ff", 128}, {"dropout", 0.1},
                   {"max_len", 16}}},
      {"train", {{"learning_rate", 1e-3}, {"epochs", 40}, {"batch_size", 8}, {"warmup_steps", 50},
                 {"weight_decay", 0.01}}}};
  std::ofstream(path) << cfg.dump(2) << '\n';
}

struct PipelineRun {
  fs::path work;
  std::map<std::string, double> weighted_f1;
  double seconds = 0.0;
};

PipelineRun run_pipeline(const fs::path& dir, const fs::path& corpus, const fs::path& labels,
                         const fs::path& config) {
  PipelineRun r;
  r.work = dir;
  const auto t0 = Clock::now();
  prepare(corpus, labels, dir, 7, config);
  for (const std::string m : {"nb", "svm", "transformer"}) {
    cli({"train", "--model", m, "--out-dir", dir.string(), "--seed", "7", "--config", config.string()});
    cli({"evaluate", "--model", m, "--out-dir", dir.string(), "--split", "test"});
    const auto j = nlohmann::json::parse(read_file(dir / ("eval." + m + ".test.json")));
    r.weighted_f1[m] = j.at("report").at("weighted").at("f1").get<double>();
  }
  cli({"report", "--out-dir", dir.string()});
  r.seconds = seconds_since(t0);
  return r;
}

Outcome criterion_ordering(const PipelineRun& r) {
  const double nb = r.weighted_f1.at("nb");
  const double svm = r.weighted_f1.at("svm");
  const double tr = r.weighted_f1.at("transformer");
  Outcome o;
  o.pass = tr >= svm && svm >= nb && r.seconds < 300.0;
  o.detail = "weighted F1 transformer " + fmt("%.4f", tr) + ", SVM " + fmt("%.4f", svm) + ", NB " +
             fmt("%.4f", nb) + "; pipeline " + fmt("%.1f", r.seconds) + " s";
  return o;
}

Outcome criterion_determinism(const PipelineRun& a, const PipelineRun& b) {
  std::vector<std::string> files = {"train.jsonl", "val.jsonl", "test.jsonl", "term_index.json", "vocab.txt",
                                    "model.nb.json", "model.svm.json", "model.transformer.bin",
                                    "model.transformer.best.bin", "comparison.txt", "comparison.csv"};
  for (const std::string m : {"nb", "svm", "transformer"}) files.push_back("eval." + m + ".test.json");
  std::size_t same = 0;
  std::string differing;
  for (const auto& f : files) {
    const bool eq = fs::exists(a.work / f) && read_file(a.work / f) == read_file(b.work / f);
    same += eq;
    if (!eq) differing += " " + f;
  }
  Outcome o;
  o.pass = same == files.size();
  o.detail = std::to_string(same) + "/" + std::to_string(files.size()) + " artifacts byte-identical" +
             (differing.empty() ? "" : "; differing:" + differing);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << std::endl;
  };

  Scratch scratch;
  ReferenceCorpusRun reference;
  std::string reference_error;
  try {
    reference = run_reference_corpus(scratch);
  } catch (const std::exception& e) {
    reference_error = e.what();
  }
  const auto need_reference = [&] {
    if (!reference_error.empty()) throw std::runtime_error(reference_error);
  };
  report(1, "split arithmetic", [&] { need_reference(); return criterion_split(reference); });
  report(2, "distribution report", [&] { need_reference(); return criterion_distribution(reference); });
  report(3, "tokenizer fixture", criterion_tokenizer);
  report(4, "preprocessing goldens", criterion_golden);
  report(5, "metrics oracle", criterion_metrics);
  report(6, "naive Bayes oracle", criterion_nb);
  report(7, "TF-IDF oracle", criterion_tfidf);
  report(8, "gradient check", criterion_gradient);
  report(9, "overfit capacity", criterion_overfit);

  const fs::path dir = scratch.path() / "ordering";
  fs::create_directories(dir);
  codemix::synthetic::write_jsonl(dir / "corpus.jsonl", codemix::synthetic::sentiment(600, 0.2, 2026));
  codemix::synthetic::write_label_map(dir / "labels.json");
  write_fixture_config(dir / "config.json");
  PipelineRun first, second;
  std::string pipeline_error;
  try {
    first = run_pipeline(dir / "run1", dir / "corpus.jsonl", dir / "labels.json", dir / "config.json");
    second = run_pipeline(dir / "run2", dir / "corpus.jsonl", dir / "labels.json", dir / "config.json");
  } catch (const std::exception& e) {
    pipeline_error = e.what();
  }
  const auto need_pipeline = [&] {
    if (!pipeline_error.empty()) throw std::runtime_error(pipeline_error);
  };
  report(10, "baseline ordering", [&] { need_pipeline(); return criterion_ordering(first); });
  report(11, "determinism", [&] { need_pipeline(); return criterion_determinism(first, second); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
