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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "codemix/cli.hpp"
#include "codemix/corpus.hpp"
#include "codemix/error.hpp"
#include "codemix/features.hpp"
#include "codemix/metrics.hpp"
#include "codemix/preprocess.hpp"
#include "codemix/tokenizer.hpp"

namespace py = pybind11;

namespace {

codemix::PreprocessConfig preprocess_config(bool keep_hashtag_text, bool remove_stop_words) {
  codemix::PreprocessConfig cfg;
  cfg.keep_hashtag_text = keep_hashtag_text;
  cfg.remove_stop_words = remove_stop_words;
  return cfg;
}

codemix::TokenizerConfig tokenizer_config(std::size_t max_len, std::size_t max_word_chars) {
  codemix::TokenizerConfig cfg;
  cfg.max_len = max_len;
  cfg.max_word_chars = max_word_chars;
  cfg.validate();
  return cfg;
}

std::vector<codemix::SentimentLabel> to_labels(const std::vector<long>& ids) {
  std::vector<codemix::SentimentLabel> out;
  out.reserve(ids.size());
  for (const long id : ids) out.push_back(codemix::label_from_id(id));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hinglish sentiment toolkit core";
  m.attr("PIPELINE_VERSION") = std::string(codemix::cli::kPipelineVersion);

  static py::exception<codemix::InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<codemix::DivergenceError> divergence_error(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const codemix::InputError& e) {
      input_error(e.what());
    } catch (const codemix::DivergenceError& e) {
      divergence_error(e.what());
    }
  });

  m.def("label_name", [](long id) { return std::string(codemix::label_name(codemix::label_from_id(id))); },
        py::arg("label_id"));

  m.def(
      "clean_text",
      [](const std::string& text, bool keep_hashtag_text, bool remove_stop_words) {
        return codemix::clean_text(text, preprocess_config(keep_hashtag_text, remove_stop_words));
      },
      py::arg("text"), py::arg("keep_hashtag_text") = false, py::arg("remove_stop_words") = true);
  m.def(
      "preprocess_text",
      [](const std::string& text, bool keep_hashtag_text, bool remove_stop_words) {
        return codemix::preprocess_text(text, preprocess_config(keep_hashtag_text, remove_stop_words));
      },
      py::arg("text"), py::arg("keep_hashtag_text") = false, py::arg("remove_stop_words") = true);
  m.def(
      "is_noise", [](const std::string& text) { return codemix::is_noise(text, codemix::PreprocessConfig{}); },
      py::arg("text"));

  m.def(
      "split_sizes",
      [](std::size_t n, std::pair<std::uint64_t, std::uint64_t> train, std::pair<std::uint64_t, std::uint64_t> val) {
        codemix::SplitSpec spec;
        spec.train = {train.first, train.second};
        spec.val = {val.first, val.second};
        spec.validate();
        const auto s = codemix::split_sizes(n, spec);
        return py::make_tuple(s.train, s.val, s.test);
      },
      py::arg("n"), py::arg("train") = std::pair<std::uint64_t, std::uint64_t>{8, 10},
      py::arg("val") = std::pair<std::uint64_t, std::uint64_t>{1, 10});

  py::class_<codemix::Vocabulary>(m, "Vocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("tokens"))
      .def_static("with_specials", &codemix::Vocabulary::with_specials, py::arg("pieces"))
      .def_static(
          "load", [](const std::string& path) { return codemix::load_vocabulary(path); }, py::arg("path"))
      .def(
          "save", [](const codemix::Vocabulary& v, const std::string& path) { codemix::save_vocabulary(v, path); },
          py::arg("path"))
      .def_property_readonly("tokens", &codemix::Vocabulary::tokens)
      .def("find", &codemix::Vocabulary::find, py::arg("token"))
      .def("__len__", &codemix::Vocabulary::size)
      .def("__contains__", &codemix::Vocabulary::contains);

  m.def(
      "train_vocabulary",
      [](const std::vector<std::string>& texts, std::size_t size, std::size_t max_word_chars) {
        return codemix::train_vocabulary(texts, size, tokenizer_config(128, max_word_chars));
      },
      py::arg("texts"), py::arg("size"), py::arg("max_word_chars") = 100);
  m.def(
      "tokenize",
      [](const std::string& text, const codemix::Vocabulary& v, std::size_t max_word_chars) {
        return codemix::tokenize(text, v, tokenizer_config(128, max_word_chars));
      },
      py::arg("text"), py::arg("vocab"), py::arg("max_word_chars") = 100);
  m.def(
      "encode",
      [](const std::string& text, const codemix::Vocabulary& v, std::size_t max_len) {
        const auto e = codemix::encode(text, v, tokenizer_config(max_len, 100));
        return py::make_tuple(e.ids, e.attention_mask);
      },
      py::arg("text"), py::arg("vocab"), py::arg("max_len") = 128);
  m.def(
      "decode",
      [](const std::vector<codemix::TokenId>& ids, const codemix::Vocabulary& v) {
        codemix::Encoding e;
        e.ids = ids;
        e.attention_mask.assign(ids.size(), 1);
        e.num_real = ids.size();
        return codemix::decode(e, v);
      },
      py::arg("ids"), py::arg("vocab"));

  py::class_<codemix::TermIndex>(m, "TermIndex")
      .def_property_readonly("terms", &codemix::TermIndex::terms)
      .def_property_readonly("document_frequency", &codemix::TermIndex::document_frequency)
      .def_property_readonly("num_docs", &codemix::TermIndex::num_docs)
      .def("idf", &codemix::TermIndex::idf, py::arg("feature_id"))
      .def("__len__", &codemix::TermIndex::size);
  m.def("fit_term_index", &codemix::fit_term_index, py::arg("texts"), py::arg("min_df") = 1);
  m.def(
      "tfidf",
      [](const std::string& text, const codemix::TermIndex& idx) {
        return codemix::tfidf_transform(text, idx).entries();
      },
      py::arg("text"), py::arg("index"));

  m.def(
      "_evaluate_json",
      [](const std::vector<long>& y_true, const std::vector<long>& y_pred) {
        return codemix::evaluate(to_labels(y_true), to_labels(y_pred)).to_json().dump();
      },
      py::arg("y_true"), py::arg("y_pred"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args, const std::string& stdin_text) {
        args.insert(args.begin(), "codemix");
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = codemix::cli::run(args, in, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
