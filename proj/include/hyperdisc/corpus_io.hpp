// Copyright 2026 The Hyperdisc Authors.
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

#ifndef HYPERDISC_CORPUS_IO_HPP_
#define HYPERDISC_CORPUS_IO_HPP_

// Readers and writers for every file format used by the pipeline:
//
//   tagged corpus   one paragraph per line, space-separated `surface_POS`
//   vocabulary      one candidate term per line (1-3 words)
//   queries         `term<TAB>Concept|Entity`
//   gold            line i holds the tab-separated hypernyms of query i
//   predictions     line i holds up to 15 tab-separated candidates
//
// All files are UTF-8 with '\n' line endings. Terms are lowercased on load.

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyperdisc/common.hpp"

namespace hyperdisc {

struct TaggedToken {
  std::string surface;  // original casing
  std::string pos;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct TaggedParagraph {
  std::vector<TaggedToken> tokens;

  friend bool operator==(const TaggedParagraph&, const TaggedParagraph&) = default;
};

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

// Reads up to `max_lines` lines into `lines` (cleared first). Returns false
// once the stream is exhausted and nothing was read.
inline bool read_line_block(std::istream& in, std::size_t max_lines,
                            std::vector<std::string>& lines) {
  lines.clear();
  std::string line;
  while (lines.size() < max_lines && std::getline(in, line)) {
    lines.push_back(std::move(line));
  }
  return !lines.empty();
}

// Parses one corpus line. Tokens are split on the last underscore so that
// surfaces may themselves contain underscores. Tokens lacking a separator, or
// with an empty side, are skipped and counted in `warnings`.
inline std::optional<TaggedParagraph> parse_tagged_line(
    std::string_view line, Warnings* warnings = nullptr) {
  TaggedParagraph paragraph;
  for (std::string_view field : split_ws(line)) {
    const auto cut = field.rfind('_');
    if (cut == std::string_view::npos || cut == 0 || cut + 1 == field.size()) {
      if (warnings) warnings->add("malformed token '" + std::string(field) + "'");
      continue;
    }
    paragraph.tokens.push_back(
        {std::string(field.substr(0, cut)), std::string(field.substr(cut + 1))});
  }
  if (paragraph.tokens.empty()) return std::nullopt;
  return paragraph;
}

inline std::string format_tagged_paragraph(const TaggedParagraph& paragraph) {
  std::string out;
  for (const auto& token : paragraph.tokens) {
    if (!out.empty()) out += ' ';
    out += token.surface;
    out += '_';
    out += token.pos;
  }
  return out;
}

// Sequential paragraph stream over a tagged corpus file.
class TaggedCorpusReader {
 public:
  explicit TaggedCorpusReader(const std::filesystem::path& path)
      : in_(open_input(path)) {}

  std::optional<TaggedParagraph> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lines_read_;
      if (auto p = parse_tagged_line(line, &warnings_)) return p;
    }
    return std::nullopt;
  }

  const Warnings& warnings() const { return warnings_; }
  std::size_t lines_read() const { return lines_read_; }

 private:
  std::ifstream in_;
  Warnings warnings_;
  std::size_t lines_read_ = 0;
};

inline std::vector<TaggedParagraph> read_tagged_corpus(
    const std::filesystem::path& path, Warnings* warnings = nullptr) {
  TaggedCorpusReader reader(path);
  std::vector<TaggedParagraph> out;
  while (auto p = reader.next()) out.push_back(std::move(*p));
  if (warnings) *warnings = reader.warnings();
  return out;
}

inline void write_tagged_corpus(const std::filesystem::path& path,
                                std::span<const TaggedParagraph> paragraphs) {
  auto out = open_output(path);
  for (const auto& p : paragraphs) out << format_tagged_paragraph(p) << '\n';
  finish_output(out, path);
}

// Candidate hypernym vocabulary. Terms are held in internal form.
class CandidateVocabulary {
 public:
  CandidateVocabulary() = default;
  CandidateVocabulary(std::initializer_list<std::string_view> terms) {
    for (auto t : terms) insert(t);
  }

  // Accepts either "oil plant" or "oil_plant".
  bool insert(std::string_view term) { return terms_.insert(to_internal(term)).second; }

  bool contains(std::string_view internal_term) const {
    return terms_.count(std::string(internal_term)) > 0;
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Sorted internal-form terms.
  std::vector<std::string> sorted_terms() const {
    std::vector<std::string> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::unordered_set<std::string> terms_;
};

inline CandidateVocabulary load_vocabulary(const std::filesystem::path& path,
                                           Warnings* warnings = nullptr) {
  auto in = open_input(path);
  CandidateVocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto words = split_ws(line);
    if (words.empty()) continue;
    if (words.size() > 3) {
      if (warnings) {
        warnings->add("line " + std::to_string(line_no) + ": term has more than 3 words");
      }
      continue;
    }
    vocab.insert(line);
  }
  return vocab;
}

inline QueryKind parse_query_kind(std::string_view text, std::size_t line_no) {
  if (text == "Concept") return QueryKind::Concept;
  if (text == "Entity") return QueryKind::Entity;
  throw Error("line " + std::to_string(line_no) + ": unknown query kind '" +
              std::string(text) + "' (expected Concept or Entity)");
}

inline std::vector<Query> load_queries(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Query> queries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto fields = split(strip_cr(raw), '\t');
    if (fields.size() != 2) {
      throw Error("line " + std::to_string(line_no) +
                  ": expected 'term<TAB>kind' in " + path.string());
    }
    Query q{normalize_term(fields[0]), parse_query_kind(fields[1], line_no)};
    if (q.term.empty()) {
      throw Error("line " + std::to_string(line_no) + ": empty query term");
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

inline void write_queries(const std::filesystem::path& path,
                          std::span<const Query> queries) {
  auto out = open_output(path);
  for (const auto& q : queries) out << q.term << '\t' << to_string(q.kind) << '\n';
  finish_output(out, path);
}

// Splits a tab-separated line into normalized external-form terms.
inline std::vector<std::string> parse_term_list(std::string_view line) {
  std::vector<std::string> terms;
  for (auto field : split(strip_cr(line), '\t')) {
    auto term = normalize_term(field);
    if (!term.empty()) terms.push_back(std::move(term));
  }
  return terms;
}

inline std::vector<GoldSet> load_gold(const std::filesystem::path& path,
                                      std::span<const Query> queries) {
  auto in = open_input(path);
  std::vector<GoldSet> gold;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t line_no = gold.size() + 1;
    if (gold.size() >= queries.size()) {
      throw Error("gold file " + path.string() + " has more lines than the " +
                  std::to_string(queries.size()) + " queries");
    }
    auto terms = parse_term_list(line);
    if (terms.empty()) {
      throw Error("gold line " + std::to_string(line_no) + " has no hypernyms");
    }
    gold.push_back({queries[gold.size()], std::move(terms)});
  }
  if (gold.size() != queries.size()) {
    throw Error("gold file " + path.string() + " has " + std::to_string(gold.size()) +
                " lines but there are " + std::to_string(queries.size()) + " queries");
  }
  return gold;
}

// Writes one line per list; terms may be given in either form and are
// written with spaces.
inline void write_term_lists(const std::filesystem::path& path,
                             std::span<const std::vector<std::string>> lists) {
  auto out = open_output(path);
  for (const auto& list : lists) {
    if (list.size() > kMaxCandidates) {
      throw Error("prediction list exceeds " + std::to_string(kMaxCandidates) +
                  " candidates");
    }
    bool first = true;
    for (const auto& term : list) {
      if (!first) out << '\t';
      out << to_external(term);
      first = false;
    }
    out << '\n';
  }
  finish_output(out, path);
}

inline void write_predictions(const std::filesystem::path& path,
                              std::span<const RankedPrediction> predictions) {
  std::vector<std::vector<std::string>> lists;
  lists.reserve(predictions.size());
  for (const auto& p : predictions) {
    std::vector<std::string> terms;
    for (const auto& c : p.candidates) terms.push_back(c.term);
    lists.push_back(std::move(terms));
  }
  write_term_lists(path, lists);
}

// Reads a predictions file: one (possibly empty) candidate list per line.
inline std::vector<std::vector<std::string>> read_predictions(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<std::string>> lists;
  std::string line;
  while (std::getline(in, line)) lists.push_back(parse_term_list(line));
  return lists;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_CORPUS_IO_HPP_
