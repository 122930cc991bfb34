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

#include "codemix/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "codemix/error.hpp"
#include "codemix/preprocess.hpp"
#include "codemix/rng.hpp"
#include "codemix/text.hpp"

namespace codemix {
namespace {

using nlohmann::json;

std::string field_as_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw InputError("expected a string or number");
}

std::string line_error(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  return path.string() + ":" + std::to_string(line) + ": " + msg;
}

struct RawRecord {
  std::size_t line = 0;
  std::string id;
  bool has_id = false;
  std::string text;
  std::string label;
  std::string source;
};

std::vector<RawRecord> read_jsonl(const std::filesystem::path& path, std::istream& in) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::collapse_whitespace(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(line_error(path, line_no, std::string("malformed JSON: ") + e.what()));
    }
    if (!obj.is_object()) throw InputError(line_error(path, line_no, "expected a JSON object"));
    RawRecord r;
    r.line = line_no;
    try {
      if (!obj.contains("text")) throw InputError("missing field \"text\"");
      if (!obj.contains("label")) throw InputError("missing field \"label\"");
      r.text = field_as_string(obj["text"]);
      r.label = field_as_string(obj["label"]);
      if (obj.contains("id") && !obj["id"].is_null()) {
        r.id = field_as_string(obj["id"]);
        r.has_id = true;
      }
      if (obj.contains("source") && !obj["source"].is_null()) r.source = field_as_string(obj["source"]);
    } catch (const InputError& e) {
      throw InputError(line_error(path, line_no, e.what()));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// RFC 4180: quoted fields may contain commas, newlines and doubled quotes.
// Returns false at end of input. `line_no` tracks the physical line count.
bool read_csv_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no,
                  const std::filesystem::path& path) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool field_was_quoted = false;
  const std::size_t start_line = line_no + 1;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw InputError(line_error(path, start_line, "unexpected quote inside unquoted field"));
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\n') {
      ++line_no;
      if (!field.empty() && field.back() == '\r' && !field_was_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw InputError(line_error(path, start_line, "unterminated quoted field"));
  if (!any) return false;
  ++line_no;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

std::vector<RawRecord> read_csv(const std::filesystem::path& path, std::istream& in) {
  std::vector<RawRecord> out;
  std::vector<std::string> row;
  std::size_t line_no = 0;
  if (!read_csv_row(in, row, line_no, path)) return out;
  if (!row.empty() && row[0].rfind("\xEF\xBB\xBF", 0) == 0) row[0].erase(0, 3);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < row.size(); ++i) col[text::lowercase(row[i])] = i;
  if (!col.contains("text") || !col.contains("label")) {
    throw InputError(line_error(path, 1, "CSV header must contain \"text\" and \"label\" columns"));
  }
  const std::size_t ncols = row.size();
  while (true) {
    const std::size_t start = line_no + 1;
    if (!read_csv_row(in, row, line_no, path)) break;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != ncols) {
      throw InputError(line_error(path, start,
                                  "expected " + std::to_string(ncols) + " fields, found " +
                                      std::to_string(row.size())));
    }
    RawRecord r;
    r.line = start;
    r.text = row[col["text"]];
    r.label = row[col["label"]];
    if (auto it = col.find("id"); it != col.end() && !row[it->second].empty()) {
      r.id = row[it->second];
      r.has_id = true;
    }
    if (auto it = col.find("source"); it != col.end()) r.source = row[it->second];
    out.push_back(std::move(r));
  }
  return out;
}

// Adds one to (or removes one from) per-class counts until their sum hits
// `target`, visiting classes by fractional part. Classes are revisited
// cyclically if one pass is not enough.
void apportion(std::array<std::size_t, kNumLabels>& alloc,
               const std::array<std::uint64_t, kNumLabels>& frac,
               const std::array<std::size_t, kNumLabels>& capacity,
               const std::array<bool, kNumLabels>& eligible, std::size_t target) {
  std::array<std::size_t, kNumLabels> order{};
  std::iota(order.begin(), order.end(), 0);
  std::size_t sum = std::accumulate(alloc.begin(), alloc.end(), std::size_t{0});
  if (sum < target) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    bool progress = true;
    while (sum < target && progress) {
      progress = false;
      for (const std::size_t c : order) {
        if (sum == target) break;
        if (eligible[c] && alloc[c] < capacity[c]) {
          ++alloc[c];
          ++sum;
          progress = true;
        }
      }
    }
  } else if (sum > target) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] < frac[b]; });
    bool progress = true;
    while (sum > target && progress) {
      progress = false;
      for (const std::size_t c : order) {
        if (sum == target) break;
        if (eligible[c] && alloc[c] > 0) {
          --alloc[c];
          --sum;
          progress = true;
        }
      }
    }
  }
}

std::size_t floor_mul(std::size_t n, const Fraction& f) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(n) * f.num) / f.den);
}

std::uint64_t frac_mul(std::size_t n, const Fraction& f) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * f.num) % f.den);
}

}  // namespace

Corpus::Corpus(std::vector<LabeledTweet> records) : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  seen.reserve(records_.size());
  for (const auto& r : records_) {
    if (!seen.insert(r.id).second) throw InputError("duplicate record id: " + r.id);
  }
}

std::vector<std::string> Corpus::texts() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.text);
  return out;
}

std::vector<SentimentLabel> Corpus::labels() const {
  std::vector<SentimentLabel> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.label);
  return out;
}

CorpusFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = text::lowercase(path.extension().string());
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return CorpusFormat::Jsonl;
  if (ext == ".csv") return CorpusFormat::Csv;
  throw InputError("cannot infer corpus format from extension: " + path.string());
}

LabelMap load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open label map: " + path.string());
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
  if (!obj.is_object()) throw InputError(path.string() + ": label map must be a JSON object");
  LabelMap out;
  for (const auto& [raw, target] : obj.items()) {
    const auto label = target.is_string() ? parse_label(target.get<std::string>()) : std::nullopt;
    if (!label) {
      throw InputError(path.string() + ": label \"" + raw +
                       "\" must map to \"negative\", \"neutral\" or \"positive\"");
    }
    out.emplace(raw, *label);
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, const LabelMap& label_map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus file: " + path.string());
  const std::vector<RawRecord> raw =
      format == CorpusFormat::Jsonl ? read_jsonl(path, in) : read_csv(path, in);

  std::set<std::string> unmapped;
  for (const auto& r : raw) {
    if (!label_map.contains(r.label)) unmapped.insert(r.label);
  }
  if (!unmapped.empty()) {
    std::string list;
    for (const auto& u : unmapped) list += (list.empty() ? "\"" : ", \"") + u + "\"";
    throw InputError(path.string() + ": labels missing from label map: " + list);
  }

  const std::string stem = path.stem().string();
  std::vector<LabeledTweet> records;
  records.reserve(raw.size());
  std::unordered_map<std::string, std::size_t> id_line;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = raw[i];
    if (text::collapse_whitespace(r.text).empty()) {
      throw InputError(line_error(path, r.line, "empty text"));
    }
    LabeledTweet t;
    t.id = r.has_id ? r.id : std::to_string(i);
    t.text = r.text;
    t.label = label_map.at(r.label);
    t.source = r.source.empty() ? stem : r.source;
    if (auto [it, inserted] = id_line.emplace(t.id, r.line); !inserted) {
      throw InputError(line_error(path, r.line, "duplicate id \"" + t.id + "\" (first seen on line " +
                                                    std::to_string(it->second) + ")"));
    }
    records.push_back(std::move(t));
  }
  return Corpus(std::move(records));
}

void save_corpus_jsonl(const Corpus& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& r : c) {
    json obj = {{"id", r.id}, {"text", r.text}, {"label", std::string(label_key(r.label))},
                {"source", r.source}};
    out << obj.dump() << '\n';
  }
}

Corpus merge(const Corpus& a, const Corpus& b) {
  std::vector<LabeledTweet> out(a.records());
  out.reserve(a.size() + b.size());
  std::unordered_set<std::string> used;
  for (const auto& r : a) used.insert(r.id);
  for (const auto& r : b) used.insert(r.id);
  std::unordered_set<std::string> placed;
  for (const auto& r : a) placed.insert(r.id);
  for (LabeledTweet r : b) {
    if (placed.contains(r.id)) {
      for (std::size_t k = 1;; ++k) {
        std::string candidate = r.id + "." + std::to_string(k);
        if (!used.contains(candidate)) {
          r.id = std::move(candidate);
          break;
        }
      }
    }
    used.insert(r.id);
    placed.insert(r.id);
    out.push_back(std::move(r));
  }
  return Corpus(std::move(out));
}

std::string normalized_dedup_key(const std::string& raw) {
  const std::string lowered = text::lowercase(normalize_text(raw));
  std::vector<std::string> tokens;
  for (const auto& tok : text::split_whitespace(lowered)) {
    const auto cps = text::decode(tok);
    std::size_t lo = 0;
    std::size_t hi = cps.size();
    auto keep = [](char32_t cp) { return cp >= 0x80 || std::isalnum(static_cast<int>(cp)); };
    while (lo < hi && !keep(cps[lo].value)) ++lo;
    while (hi > lo && !keep(cps[hi - 1].value)) --hi;
    if (lo == hi) continue;
    tokens.push_back(tok.substr(cps[lo].offset, cps[hi - 1].offset + cps[hi - 1].length - cps[lo].offset));
  }
  return text::join(tokens, " ");
}

Corpus dedup(const Corpus& c, DedupKey key) {
  std::unordered_set<std::string> seen;
  std::vector<LabeledTweet> out;
  for (const auto& r : c) {
    std::string k = key == DedupKey::ExactText ? r.text : normalized_dedup_key(r.text);
    if (seen.insert(std::move(k)).second) out.push_back(r);
  }
  return Corpus(std::move(out));
}

ClassDistribution class_distribution(const Corpus& c) {
  if (c.empty()) throw InputError("class distribution of an empty corpus is undefined");
  ClassDistribution d;
  for (const auto& r : c) ++d.counts[label_id(r.label)];
  d.total = c.size();
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    d.fractions[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
  }
  return d;
}

std::string format_distribution(const ClassDistribution& d) {
  std::array<std::size_t, kNumLabels> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d.counts[a] > d.counts[b]; });
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "%-16s %-9s %12s %11s\n", "Sentiment Class", "Label ID",
                "Tweet Count", "Percentage");
  os << line;
  for (const std::size_t i : order) {
    const auto l = static_cast<SentimentLabel>(i);
    std::snprintf(line, sizeof(line), "%-16s %-9zu %12s %10s%%\n",
                  std::string(label_name(l)).c_str(), i, text::format_count(d.counts[i]).c_str(),
                  text::format_fixed(100.0 * d.fractions[i], 1).c_str());
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-16s %-9s %12s %10s%%\n", "Total", "",
                text::format_count(d.total).c_str(), "100.0");
  os << line;
  return os.str();
}

std::string distribution_csv(const ClassDistribution& d) {
  std::ostringstream os;
  os << "label,label_id,count,fraction\n";
  for (const auto l : kAllLabels) {
    char frac[32];
    std::snprintf(frac, sizeof(frac), "%.17g", d.fractions[label_id(l)]);
    os << label_key(l) << ',' << label_id(l) << ',' << d.counts[label_id(l)] << ',' << frac << '\n';
  }
  return os.str();
}

void SplitSpec::validate() const {
  auto positive = [](const Fraction& f) { return f.den > 0 && f.num > 0 && f.num < f.den; };
  if (!positive(train) || !positive(val)) {
    throw InputError("split fractions must lie strictly between 0 and 1");
  }
  if (train.den > (1ULL << 31) || val.den > (1ULL << 31)) {
    throw InputError("split fraction denominators must be below 2^31");
  }
  const auto lhs = static_cast<unsigned __int128>(train.num) * val.den +
                   static_cast<unsigned __int128>(val.num) * train.den;
  const auto rhs = static_cast<unsigned __int128>(train.den) * val.den;
  if (lhs >= rhs) throw InputError("train and validation fractions must sum to less than 1");
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  SplitSizes s;
  s.train = floor_mul(n, spec.train);
  s.val = floor_mul(n, spec.val);
  s.test = n - s.train - s.val;
  return s;
}

CorpusSplit split(const Corpus& c, const SplitSpec& spec) {
  spec.validate();
  if (c.empty()) throw InputError("cannot split an empty corpus");

  std::array<std::vector<std::size_t>, kNumLabels> by_class;
  for (std::size_t i = 0; i < c.size(); ++i) by_class[label_id(c[i].label)].push_back(i);

  CorpusSplit result;
  Rng rng(spec.seed);
  std::array<std::size_t, kNumLabels> n{};
  std::array<bool, kNumLabels> eligible{};
  std::size_t small_total = 0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    rng.shuffle(std::span<std::size_t>(by_class[k]));
    n[k] = by_class[k].size();
    eligible[k] = n[k] >= 3;
    if (!eligible[k]) {
      small_total += n[k];
      if (n[k] > 0) {
        result.warnings.push_back("class " + std::string(label_name(static_cast<SentimentLabel>(k))) +
                                  " has " + std::to_string(n[k]) +
                                  " record(s); all assigned to train");
      }
    }
  }

  const SplitSizes target = split_sizes(c.size(), spec);
  std::array<std::size_t, kNumLabels> train_n{};
  std::array<std::size_t, kNumLabels> val_n{};
  std::array<std::uint64_t, kNumLabels> frac{};
  std::array<std::size_t, kNumLabels> cap{};
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    if (!eligible[k]) {
      train_n[k] = n[k];
      continue;
    }
    train_n[k] = floor_mul(n[k], spec.train);
    frac[k] = frac_mul(n[k], spec.train);
    cap[k] = n[k];
  }
  std::array<std::size_t, kNumLabels> eligible_train{};
  for (std::size_t k = 0; k < kNumLabels; ++k) eligible_train[k] = eligible[k] ? train_n[k] : 0;
  const std::size_t train_goal = target.train > small_total ? target.train - small_total : 0;
  apportion(eligible_train, frac, cap, eligible, train_goal);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    if (eligible[k]) train_n[k] = eligible_train[k];
  }

  for (std::size_t k = 0; k < kNumLabels; ++k) {
    if (!eligible[k]) continue;
    cap[k] = n[k] - train_n[k];
    val_n[k] = std::min(floor_mul(n[k], spec.val), cap[k]);
    frac[k] = frac_mul(n[k], spec.val);
  }
  apportion(val_n, frac, cap, eligible, target.val);

  std::vector<int> assignment(c.size(), 2);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const auto& idx = by_class[k];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      assignment[idx[j]] = j < train_n[k] ? 0 : (j < train_n[k] + val_n[k] ? 1 : 2);
    }
  }
  std::array<std::vector<LabeledTweet>, 3> parts;
  for (std::size_t i = 0; i < c.size(); ++i) parts[assignment[i]].push_back(c[i]);
  result.train = Corpus(std::move(parts[0]));
  result.val = Corpus(std::move(parts[1]));
  result.test = Corpus(std::move(parts[2]));
  return result;
}

}  // namespace codemix
