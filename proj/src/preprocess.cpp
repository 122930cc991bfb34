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

#include "codemix/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "codemix/error.hpp"
#include "codemix/text.hpp"

namespace codemix {
namespace {

bool is_affect_token(std::string_view token) {
  if (token.empty()) return false;
  for (const auto& c : text::decode(token)) {
    if (!text::is_alphabetic(c.value) || text::is_upper(c.value)) return false;
  }
  return true;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && ascii_lower(s.substr(0, prefix.size())) == prefix;
}

// One pass of the URL / mention / hashtag rules over a non-emoji run.
std::string apply_token_rules(std::string run, bool keep_hashtag_text) {
  for (;;) {
    const std::string before = run;
    const std::string lower = ascii_lower(run);
    const std::size_t cut = std::min(lower.find("http://"), lower.find("https://"));
    if (cut != std::string::npos) run.resize(cut);
    if (starts_with_ci(run, "www.") || (!run.empty() && run.front() == '@')) return {};
    if (!run.empty() && run.front() == '#') {
      if (!keep_hashtag_text) return {};
      run.erase(0, run.find_first_not_of('#'));
    }
    std::erase(run, '#');
    if (run == before) return run;
  }
}

std::set<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = text::collapse_whitespace(line);
    if (entry.empty() || entry.front() == '#') continue;
    out.insert(entry);
  }
  return out;
}

}  // namespace

EmojiLexicon::EmojiLexicon(std::map<std::string, std::string> mapping) : mapping_(std::move(mapping)) {
  for (const auto& [emoji, token] : mapping_) {
    if (emoji.empty()) throw InputError("emoji lexicon: empty key");
    if (!is_affect_token(token)) {
      throw InputError("emoji lexicon: token \"" + token + "\" must be lowercase alphabetic");
    }
    max_codepoints_ = std::max(max_codepoints_, text::length(emoji));
  }
}

WordList::WordList(std::set<std::string> words) : words_(std::move(words)) {
  for (const auto& w : words_) {
    if (w.empty() || text::lowercase(w) != w || text::split_whitespace(w).size() != 1 ||
        text::split_whitespace(w)[0] != w) {
      throw InputError("stop word \"" + w + "\" must be a lowercase word without whitespace");
    }
  }
}

FillerList::FillerList() : FillerList(default_fillers()) {}

FillerList::FillerList(std::set<std::string> phrases) : phrases_(std::move(phrases)) {
  for (const auto& p : phrases_) {
    if (p.empty() || text::lowercase(p) != p || text::collapse_whitespace(p) != p) {
      throw InputError("filler \"" + p + "\" must be lowercase with single spaces");
    }
  }
  for (const char* required : {"ok", "hmm", "k", "haan"}) {
    phrases_.insert(required);
  }
}

EmojiLexicon default_emoji_lexicon() {
  return EmojiLexicon({
      {"😞", "sad"},      {"😢", "sad"},       {"😔", "sad"},       {"🙁", "sad"},
      {"☹", "sad"},       {"☹️", "sad"},       {"😭", "cry"},       {"😡", "angry"},
      {"😠", "angry"},    {"🤬", "angry"},     {"😤", "angry"},     {"❤", "love"},
      {"❤️", "love"},     {"💕", "love"},      {"💖", "love"},      {"😍", "love"},
      {"🥰", "love"},     {"😘", "love"},      {"😂", "laugh"},     {"🤣", "laugh"},
      {"😆", "laugh"},    {"😄", "happy"},     {"😃", "happy"},     {"😀", "happy"},
      {"😁", "happy"},    {"😊", "happy"},     {"🙂", "happy"},     {"😉", "wink"},
      {"👍", "good"},     {"👎", "bad"},       {"👏", "applause"},  {"🙏", "thanks"},
      {"🔥", "fire"},     {"💯", "perfect"},   {"🎉", "celebrate"}, {"😱", "shock"},
      {"😮", "surprise"}, {"😐", "neutral"},   {"😑", "neutral"},   {"🤔", "thinking"},
      {"😴", "bored"},    {"🤮", "disgust"},   {"💔", "heartbreak"}, {"😒", "annoyed"},
  });
}

WordList default_stop_words() {
  return WordList({
      // English function words
      "a", "an", "the", "is", "am", "are", "was", "were", "be", "been", "of", "to", "in",
      "on", "at", "for", "with", "by", "from", "it", "its", "this", "that", "these",
      "those", "and", "or", "as", "i", "you", "he", "she", "we", "they", "me", "my",
      "your", "our", "so", "there",
      // Romanized Hindi function words
      "hai", "hain", "ka", "ki", "ke", "ko", "se", "mein", "aur", "ye", "yeh", "wo",
      "woh", "toh", "bhi", "tha", "thi", "ho", "hi",
  });
}

FillerList default_fillers() {
  return FillerList(std::set<std::string>{"ok", "okay", "okk", "ohk", "k", "kk", "hmm", "hm",
                                          "hmmm", "haan", "han", "ji"});
}

EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open emoji lexicon: " + path.string());
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
  if (!obj.is_object()) throw InputError(path.string() + ": emoji lexicon must be a JSON object");
  std::map<std::string, std::string> mapping;
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_string()) throw InputError(path.string() + ": value for \"" + k + "\" must be a string");
    mapping.emplace(k, v.get<std::string>());
  }
  return EmojiLexicon(std::move(mapping));
}

WordList load_word_list(const std::filesystem::path& path) { return WordList(read_lines(path)); }

FillerList load_filler_list(const std::filesystem::path& path) { return FillerList(read_lines(path)); }

std::string normalize_text(std::string_view input, bool keep_hashtag_text) {
  std::vector<std::string> tokens;
  for (const auto& tok : text::split_whitespace(input)) {
    std::string out;
    std::string run;
    for (const auto& c : text::decode(tok)) {
      const std::string_view bytes = std::string_view(tok).substr(c.offset, c.length);
      if (text::is_pictographic(c.value)) {
        out += apply_token_rules(std::move(run), keep_hashtag_text);
        run.clear();
        out.append(bytes);
      } else {
        run.append(bytes);
      }
    }
    out += apply_token_rules(std::move(run), keep_hashtag_text);
    if (!out.empty()) tokens.push_back(std::move(out));
  }
  return text::join(tokens, " ");
}

std::string replace_emojis(std::string_view input, const EmojiLexicon& lex) {
  const auto cps = text::decode(input);
  std::string out;
  out.reserve(input.size());
  bool changed = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    bool matched = false;
    const std::size_t longest = std::min(lex.max_codepoints(), cps.size() - i);
    for (std::size_t n = longest; n >= 1 && !matched; --n) {
      const std::size_t begin = cps[i].offset;
      const std::size_t end = cps[i + n - 1].offset + cps[i + n - 1].length;
      const auto it = lex.mapping().find(std::string(input.substr(begin, end - begin)));
      if (it != lex.mapping().end()) {
        out.push_back(' ');
        out += it->second;
        out.push_back(' ');
        i += n;
        matched = true;
      }
    }
    if (matched) {
      changed = true;
      continue;
    }
    if (text::is_pictographic(cps[i].value)) {
      out.push_back(' ');
      changed = true;
    } else {
      out.append(input.substr(cps[i].offset, cps[i].length));
    }
    ++i;
  }
  return changed ? text::collapse_whitespace(out) : std::string(input);
}

std::string normalize_case_and_stopwords(std::string_view input, const PreprocessConfig& cfg) {
  std::vector<std::string> kept;
  for (auto& tok : text::split_whitespace(text::lowercase(input))) {
    if (cfg.remove_stop_words && cfg.stop_words.contains(tok)) continue;
    kept.push_back(std::move(tok));
  }
  return text::join(kept, " ");
}

std::string clean_text(std::string_view input, const PreprocessConfig& cfg) {
  const std::string normalized = normalize_text(input, cfg.keep_hashtag_text);
  const std::string with_affect = replace_emojis(normalized, cfg.emoji_lexicon);
  return normalize_case_and_stopwords(with_affect, cfg);
}

NoiseReason noise_reason(std::string_view input, const PreprocessConfig& cfg) {
  if (!text::has_alphabetic(input)) return NoiseReason::NoAlpha;
  if (cfg.fillers.contains(text::lowercase(text::collapse_whitespace(input)))) return NoiseReason::Filler;
  return NoiseReason::None;
}

bool is_noise(std::string_view input, const PreprocessConfig& cfg) {
  return noise_reason(input, cfg) != NoiseReason::None;
}

std::optional<std::string> preprocess_text(std::string_view input, const PreprocessConfig& cfg) {
  std::string cleaned = clean_text(input, cfg);
  if (cleaned.empty() || is_noise(cleaned, cfg)) return std::nullopt;
  return cleaned;
}

PreprocessResult preprocess_corpus(const Corpus& c, const PreprocessConfig& cfg) {
  PreprocessResult result;
  std::vector<LabeledTweet> kept;
  std::unordered_set<std::string> seen;
  for (const auto& record : c) {
    std::string cleaned = clean_text(record.text, cfg);
    if (cleaned.empty()) {
      ++result.dropped.empty;
      continue;
    }
    switch (noise_reason(cleaned, cfg)) {
      case NoiseReason::NoAlpha:
        ++result.dropped.no_alpha;
        continue;
      case NoiseReason::Filler:
        ++result.dropped.filler;
        continue;
      case NoiseReason::None:
        break;
    }
    if (!seen.insert(cleaned).second) {
      ++result.dropped.duplicate;
      continue;
    }
    LabeledTweet t = record;
    t.text = std::move(cleaned);
    kept.push_back(std::move(t));
  }
  result.clean = Corpus(std::move(kept));
  return result;
}

}  // namespace codemix
