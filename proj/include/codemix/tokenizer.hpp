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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace codemix {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;
inline constexpr std::size_t kNumSpecials = 4;

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kContinuationPrefix = "##";

/// WordPiece inventory. Index is the token id; ids 0-3 are the specials.
/// Immutable after construction.
class Vocabulary {
 public:
  /// Validates the invariants: specials exactly once at 0-3, unique
  /// entries, no whitespace, no bare "##". Throws InputError naming the
  /// first offending index.
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Specials followed by `pieces`.
  static Vocabulary with_specials(const std::vector<std::string>& pieces);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// -1 when absent.
  TokenId find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) >= 0; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

struct TokenizerConfig {
  std::size_t max_len = 128;
  std::size_t max_word_chars = 100;

  /// Throws InputError unless max_len >= 3 and max_word_chars >= 1.
  void validate() const;
};

/// Fixed-length model input.
struct Encoding {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> attention_mask;
  std::size_t num_real = 0;

  bool operator==(const Encoding&) const = default;
};

/// Greedy longest-match-first segmentation of one word. Pieces after the
/// first carry the "##" prefix. A word with an unmatched position, or
/// longer than cfg.max_word_chars code points, becomes ["[UNK]"].
std::vector<std::string> tokenize_word(std::string_view word, const Vocabulary& v,
                                       const TokenizerConfig& cfg = {});

/// Whitespace split + tokenize_word, without specials or truncation.
std::vector<std::string> tokenize(std::string_view text, const Vocabulary& v,
                                  const TokenizerConfig& cfg = {});

/// [CLS] pieces [SEP] [PAD]...; pieces beyond max_len - 2 are cut from the
/// tail.
Encoding encode(std::string_view text, const Vocabulary& v, const TokenizerConfig& cfg = {});

/// Drops [PAD]/[CLS]/[SEP], fuses "##" pieces onto their predecessor.
/// [UNK] stays as its literal text. Throws InputError for ids out of range.
std::string decode(const Encoding& e, const Vocabulary& v);

/// Pair-merge vocabulary trainer.
///
/// Starts from the specials plus every character seen, in word-initial form
/// when it starts a word and "##" form when it occurs later. Then repeatedly
/// merges the adjacent piece pair with the highest corpus frequency (ties:
/// lexicographically smallest merged string) until `target_size` tokens
/// exist or no pair occurs at least twice. Words longer than
/// cfg.max_word_chars are ignored.
///
/// Throws InputError if target_size is below the specials plus the initial
/// alphabet; the message states the minimum.
Vocabulary train_vocabulary(const std::vector<std::string>& texts, std::size_t target_size,
                            const TokenizerConfig& cfg = {});

/// One token per line, UTF-8, line index = id.
void save_vocabulary(const Vocabulary& v, const std::filesystem::path& path);

/// Errors report the 1-based line number.
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace codemix
