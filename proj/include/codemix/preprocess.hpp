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

// Social-media text cleaning. The stages run in a fixed order:
//
//   normalize_text -> replace_emojis -> normalize_case_and_stopwords
//
// followed by noise filtering (no alphabetic characters, filler replies)
// and exact-text deduplication at corpus level.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "codemix/corpus.hpp"

namespace codemix {

/// Emoji sequence -> lowercase alphabetic affect token.
class EmojiLexicon {
 public:
  EmojiLexicon() = default;
  /// Throws InputError on an empty key or a token that is not lowercase
  /// alphabetic.
  explicit EmojiLexicon(std::map<std::string, std::string> mapping);

  const std::map<std::string, std::string>& mapping() const { return mapping_; }
  std::size_t max_codepoints() const { return max_codepoints_; }

 private:
  std::map<std::string, std::string> mapping_;
  std::size_t max_codepoints_ = 0;
};

/// Lowercase whitespace-free words.
class WordList {
 public:
  WordList() = default;
  explicit WordList(std::set<std::string> words);

  bool contains(std::string_view w) const { return words_.contains(std::string(w)); }
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

/// Whole-message filler phrases; must include ok, hmm, k and haan.
class FillerList {
 public:
  FillerList();
  explicit FillerList(std::set<std::string> phrases);

  bool contains(std::string_view phrase) const { return phrases_.contains(std::string(phrase)); }
  const std::set<std::string>& phrases() const { return phrases_; }

 private:
  std::set<std::string> phrases_;
};

EmojiLexicon default_emoji_lexicon();
WordList default_stop_words();
FillerList default_fillers();

/// JSON object: emoji string -> affect token.
EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path);
/// One entry per line; blank lines and lines starting with '#' are skipped.
WordList load_word_list(const std::filesystem::path& path);
FillerList load_filler_list(const std::filesystem::path& path);

struct PreprocessConfig {
  EmojiLexicon emoji_lexicon = default_emoji_lexicon();
  WordList stop_words = default_stop_words();
  FillerList fillers = default_fillers();
  bool keep_hashtag_text = false;
  bool remove_stop_words = true;
};

/// Drops URL, @-mention and hashtag tokens and collapses whitespace.
///
/// Rules apply to each whitespace token, split further at emoji so that
/// "😂@user" loses its mention as well:
///   - a piece containing "http://" or "https://" (any case) is cut at the
///     scheme; a piece starting with "www." is dropped;
///   - a piece starting with '@' is dropped;
///   - a piece starting with '#' is dropped, or with keep_hashtag_text only
///     its leading '#' characters are;
///   - any '#' left over is deleted.
std::string normalize_text(std::string_view text, bool keep_hashtag_text = false);

/// Replaces lexicon emoji with " token " (longest sequence wins); any other
/// pictographic code point becomes a space. When anything was replaced,
/// whitespace is collapsed; otherwise the text is returned as is.
std::string replace_emojis(std::string_view text, const EmojiLexicon& lex);

/// Lowercases; drops stop-word tokens when cfg.remove_stop_words is set;
/// joins the surviving tokens with single spaces.
std::string normalize_case_and_stopwords(std::string_view text, const PreprocessConfig& cfg);

/// The three text stages in order.
std::string clean_text(std::string_view text, const PreprocessConfig& cfg);

enum class NoiseReason { None, NoAlpha, Filler };

NoiseReason noise_reason(std::string_view text, const PreprocessConfig& cfg);

/// True when the text has no alphabetic character or, trimmed and
/// lowercased, is a filler phrase.
bool is_noise(std::string_view text, const PreprocessConfig& cfg);

/// clean_text, or nullopt when the record would be dropped (empty result
/// or noise).
std::optional<std::string> preprocess_text(std::string_view text, const PreprocessConfig& cfg);

struct DropCounts {
  std::size_t no_alpha = 0;
  std::size_t filler = 0;
  std::size_t empty = 0;
  std::size_t duplicate = 0;

  std::size_t total() const { return no_alpha + filler + empty + duplicate; }
  bool operator==(const DropCounts&) const = default;
};

struct PreprocessResult {
  Corpus clean;
  DropCounts dropped;
};

/// Cleans every record, then drops (in precedence order) empty results,
/// texts without alphabetic characters, fillers, and exact duplicates of an
/// earlier cleaned text. Each dropped record counts toward one reason.
PreprocessResult preprocess_corpus(const Corpus& c, const PreprocessConfig& cfg);

}  // namespace codemix
