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

#include "codemix/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <unordered_set>

#include "codemix/error.hpp"
#include "codemix/text.hpp"

namespace codemix {
namespace {

constexpr std::string_view kSpecials[kNumSpecials] = {kPadToken, kUnkToken, kClsToken, kSepToken};

bool is_special(std::string_view t) {
  return std::find(std::begin(kSpecials), std::end(kSpecials), t) != std::end(kSpecials);
}

bool is_continuation(std::string_view t) { return t.starts_with(kContinuationPrefix); }

// Empty string when valid, otherwise the reason.
std::string check_piece(std::string_view t) {
  if (t.empty()) return "empty token";
  for (const auto& c : text::decode(t)) {
    if (text::is_space(c.value)) return "token contains whitespace";
  }
  if (t == kContinuationPrefix) return "continuation prefix without a body";
  return {};
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kNumSpecials) {
    throw InputError("vocabulary needs the 4 special tokens, got " + std::to_string(tokens_.size()) +
                     " entries");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (i < kNumSpecials) {
      if (t != kSpecials[i]) {
        throw InputError("vocabulary index " + std::to_string(i) + ": expected " +
                         std::string(kSpecials[i]) + ", found \"" + t + "\"");
      }
    } else {
      if (is_special(t)) {
        throw InputError("vocabulary index " + std::to_string(i) + ": special token " + t +
                         " outside its reserved id");
      }
      if (auto why = check_piece(t); !why.empty()) {
        throw InputError("vocabulary index " + std::to_string(i) + ": " + why);
      }
    }
    if (!index_.emplace(t, static_cast<TokenId>(i)).second) {
      throw InputError("vocabulary index " + std::to_string(i) + ": duplicate token \"" + t + "\"");
    }
  }
}

Vocabulary Vocabulary::with_specials(const std::vector<std::string>& pieces) {
  std::vector<std::string> all(std::begin(kSpecials), std::end(kSpecials));
  all.insert(all.end(), pieces.begin(), pieces.end());
  return Vocabulary(std::move(all));
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw InputError("token id " + std::to_string(id) + " out of range for vocabulary of size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

void TokenizerConfig::validate() const {
  if (max_len < 3) throw InputError("max_len must be at least 3");
  if (max_word_chars < 1) throw InputError("max_word_chars must be positive");
}

std::vector<std::string> tokenize_word(std::string_view word, const Vocabulary& v,
                                       const TokenizerConfig& cfg) {
  const auto cps = text::decode(word);
  if (cps.empty() || cps.size() > cfg.max_word_chars) return {std::string(kUnkToken)};

  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::string candidate;
  while (start < cps.size()) {
    bool found = false;
    for (std::size_t end = cps.size(); end > start; --end) {
      const std::size_t b = cps[start].offset;
      const std::size_t e = cps[end - 1].offset + cps[end - 1].length;
      candidate.clear();
      if (start > 0) candidate.append(kContinuationPrefix);
      candidate.append(word.substr(b, e - b));
      if (v.contains(candidate)) {
        pieces.push_back(candidate);
        start = end;
        found = true;
        break;
      }
    }
    if (!found) return {std::string(kUnkToken)};
  }
  return pieces;
}

std::vector<std::string> tokenize(std::string_view input, const Vocabulary& v,
                                  const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& word : text::split_whitespace(input)) {
    auto pieces = tokenize_word(word, v, cfg);
    out.insert(out.end(), std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()));
  }
  return out;
}

Encoding encode(std::string_view input, const Vocabulary& v, const TokenizerConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> pieces = tokenize(input, v, cfg);
  const std::size_t keep = std::min(pieces.size(), cfg.max_len - 2);
  Encoding e;
  e.ids.assign(cfg.max_len, kPadId);
  e.attention_mask.assign(cfg.max_len, 0);
  e.ids[0] = kClsId;
  for (std::size_t i = 0; i < keep; ++i) e.ids[i + 1] = v.find(pieces[i]);
  e.ids[keep + 1] = kSepId;
  e.num_real = keep + 2;
  std::fill_n(e.attention_mask.begin(), e.num_real, std::uint8_t{1});
  return e;
}

std::string decode(const Encoding& e, const Vocabulary& v) {
  std::string out;
  for (const TokenId id : e.ids) {
    const std::string& tok = v.token(id);
    if (id == kPadId || id == kClsId || id == kSepId) continue;
    if (id != kUnkId && is_continuation(tok)) {
      out.append(tok, kContinuationPrefix.size());
    } else {
      if (!out.empty()) out.push_back(' ');
      out.append(tok);
    }
  }
  return out;
}

Vocabulary train_vocabulary(const std::vector<std::string>& texts, std::size_t target_size,
                            const TokenizerConfig& cfg) {
  cfg.validate();
  std::map<std::string, std::uint64_t> word_counts;
  for (const auto& t : texts) {
    for (auto& w : text::split_whitespace(t)) {
      if (text::length(w) <= cfg.max_word_chars) ++word_counts[std::move(w)];
    }
  }

  // Initial alphabet.
  std::set<std::string> alphabet;
  for (const auto& [w, n] : word_counts) {
    const auto cps = text::decode(w);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::string piece = i == 0 ? std::string() : std::string(kContinuationPrefix);
      piece.append(w, cps[i].offset, cps[i].length);
      alphabet.insert(std::move(piece));
    }
  }
  const std::size_t minimum = kNumSpecials + alphabet.size();
  if (target_size < minimum) {
    throw InputError("target vocabulary size " + std::to_string(target_size) +
                     " is too small; the specials plus initial alphabet need at least " +
                     std::to_string(minimum));
  }

  std::vector<std::string> pieces(alphabet.begin(), alphabet.end());
  std::unordered_map<std::string, int> piece_id;
  for (std::size_t i = 0; i < pieces.size(); ++i) piece_id.emplace(pieces[i], static_cast<int>(i));

  struct Word {
    std::vector<int> seq;
    std::uint64_t count;
  };
  std::vector<Word> words;
  words.reserve(word_counts.size());
  for (const auto& [w, n] : word_counts) {
    Word word{{}, n};
    const auto cps = text::decode(w);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::string piece = i == 0 ? std::string() : std::string(kContinuationPrefix);
      piece.append(w, cps[i].offset, cps[i].length);
      word.seq.push_back(piece_id.at(piece));
    }
    words.push_back(std::move(word));
  }

  auto key_of = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  };
  auto merged_of = [&](std::uint64_t key) {
    const std::string& left = pieces[static_cast<std::size_t>(key >> 32)];
    const std::string& right = pieces[static_cast<std::size_t>(key & 0xFFFFFFFFu)];
    return left + right.substr(kContinuationPrefix.size());
  };

  std::unordered_map<std::uint64_t, std::uint64_t> pair_count;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> pair_words;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const auto& seq = words[wi].seq;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto k = key_of(seq[i], seq[i + 1]);
      pair_count[k] += words[wi].count;
      auto& where = pair_words[k];
      if (where.empty() || where.back() != wi) where.push_back(wi);
    }
  }

  struct Candidate {
    std::uint64_t count;
    std::string merged;
    std::uint64_t key;
  };
  // Top of the heap: highest count, then smallest merged string.
  auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count < b.count;
    return a.merged > b.merged;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);
  for (const auto& [k, n] : pair_count) heap.push({n, merged_of(k), k});

  std::size_t vocab_size = minimum;
  while (vocab_size < target_size && !heap.empty()) {
    const Candidate best = heap.top();
    heap.pop();
    const auto live = pair_count.find(best.key);
    if (live == pair_count.end() || live->second != best.count) continue;
    if (best.count < 2) break;

    const int left = static_cast<int>(best.key >> 32);
    const int right = static_cast<int>(best.key & 0xFFFFFFFFu);
    int merged_id;
    if (auto it = piece_id.find(best.merged); it != piece_id.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<int>(pieces.size());
      pieces.push_back(best.merged);
      piece_id.emplace(best.merged, merged_id);
      ++vocab_size;
    }

    std::unordered_set<std::uint64_t> touched;
    const std::vector<std::size_t> affected = pair_words[best.key];
    for (const std::size_t wi : affected) {
      auto& seq = words[wi].seq;
      const std::uint64_t n = words[wi].count;
      bool present = false;
      for (std::size_t i = 0; i + 1 < seq.size() && !present; ++i) {
        present = seq[i] == left && seq[i + 1] == right;
      }
      if (!present) continue;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const auto k = key_of(seq[i], seq[i + 1]);
        pair_count[k] -= n;
        touched.insert(k);
      }
      std::vector<int> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
          next.push_back(merged_id);
          ++i;
        } else {
          next.push_back(seq[i]);
        }
      }
      seq = std::move(next);
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const auto k = key_of(seq[i], seq[i + 1]);
        pair_count[k] += n;
        touched.insert(k);
        auto& where = pair_words[k];
        if (where.empty() || where.back() != wi) where.push_back(wi);
      }
    }
    // Sorted so heap insertion order (and thus tie handling) is fixed.
    std::vector<std::uint64_t> order(touched.begin(), touched.end());
    std::sort(order.begin(), order.end());
    for (const auto k : order) {
      const auto n = pair_count[k];
      if (n == 0) {
        pair_count.erase(k);
      } else {
        heap.push({n, merged_of(k), k});
      }
    }
  }
  return Vocabulary::with_specials(pieces);
}

void save_vocabulary(const Vocabulary& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& t : v.tokens()) out << t << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vocabulary: " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  try {
    return Vocabulary(std::move(tokens));
  } catch (const InputError& e) {
    // Re-anchor "index N" to a line number.
    const std::string msg = e.what();
    const std::string marker = "vocabulary index ";
    if (msg.rfind(marker, 0) == 0) {
      const std::size_t colon = msg.find(':');
      const std::size_t index = std::stoul(msg.substr(marker.size(), colon - marker.size()));
      throw InputError(path.string() + ":" + std::to_string(index + 1) + msg.substr(colon));
    }
    throw InputError(path.string() + ": " + msg);
  }
}

}  // namespace codemix
