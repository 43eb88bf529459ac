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

#ifndef HYPERDISC_NORMALIZE_HPP_
#define HYPERDISC_NORMALIZE_HPP_

// Builds the normalized corpus: lowercased content words (nouns, verbs,
// adjectives, adverbs) followed by every bigram and trigram noun phrase of the
// paragraph, underscore-joined.

#include <filesystem>
#include <string>
#include <vector>

#include "hyperdisc/corpus_io.hpp"
#include "hyperdisc/parallel.hpp"

namespace hyperdisc {

enum class PosClass { Noun, Verb, Adjective, Adverb, Other };

// Penn Treebank tags by prefix: NN*, VB*, JJ*, RB*.
inline PosClass classify_pos(std::string_view tag) {
  if (tag.starts_with("NN")) return PosClass::Noun;
  if (tag.starts_with("VB")) return PosClass::Verb;
  if (tag.starts_with("JJ")) return PosClass::Adjective;
  if (tag.starts_with("RB")) return PosClass::Adverb;
  return PosClass::Other;
}

inline bool is_noun(std::string_view tag) { return classify_pos(tag) == PosClass::Noun; }

inline bool is_chunkable(std::string_view tag) {
  const auto c = classify_pos(tag);
  return c == PosClass::Noun || c == PosClass::Adjective;
}

// Lowercases a surface and drops ASCII punctuation other than apostrophe and
// hyphen. Underscores become hyphens so that '_' only ever joins phrase words.
// Non-ASCII bytes (UTF-8 letters) pass through.
inline std::string clean_word(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (char raw : surface) {
    const auto c = static_cast<unsigned char>(raw);
    if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' ||
               c == '-' || c >= 0x80) {
      out += raw;
    } else if (c == '_') {
      out += '-';
    }
  }
  return out;
}

struct NounPhrase {
  std::vector<std::string> words;  // cleaned, lowercase
  std::size_t head_index = 0;
  std::size_t begin = 0;  // token offset in the source paragraph

  std::string joined() const { return join(words, "_"); }

  friend bool operator==(const NounPhrase&, const NounPhrase&) = default;
};

// Every contiguous 2- and 3-token window made only of adjectives and nouns
// whose final token is a noun. Windows overlap freely. Ordered by start
// offset, bigram before trigram.
inline std::vector<NounPhrase> chunk_noun_phrases(const TaggedParagraph& paragraph) {
  const auto& tokens = paragraph.tokens;
  std::vector<NounPhrase> phrases;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t len = 2; len <= 3 && i + len <= tokens.size(); ++len) {
      bool ok = is_noun(tokens[i + len - 1].pos);
      NounPhrase np{{}, len - 1, i};
      for (std::size_t j = i; ok && j < i + len; ++j) {
        ok = is_chunkable(tokens[j].pos);
        auto w = clean_word(tokens[j].surface);
        if (w.empty()) ok = false;
        np.words.push_back(std::move(w));
      }
      if (ok) phrases.push_back(std::move(np));
    }
  }
  return phrases;
}

struct NormalizedParagraph {
  std::vector<std::string> tokens;
  std::size_t phrase_count = 0;  // trailing tokens that are noun phrases

  bool empty() const { return tokens.empty(); }
};

inline NormalizedParagraph normalize_paragraph(const TaggedParagraph& paragraph) {
  NormalizedParagraph out;
  for (const auto& token : paragraph.tokens) {
    if (classify_pos(token.pos) == PosClass::Other) continue;
    auto w = clean_word(token.surface);
    if (!w.empty()) out.tokens.push_back(std::move(w));
  }
  for (const auto& np : chunk_noun_phrases(paragraph)) {
    out.tokens.push_back(np.joined());
    ++out.phrase_count;
  }
  return out;
}

struct NormalizeStats {
  std::size_t paragraphs_in = 0;
  std::size_t paragraphs_out = 0;
  std::size_t phrases_appended = 0;
  Warnings warnings;
};

// Streams `in_path` in blocks, normalizing each block across `workers`
// threads. Output order always matches input order.
inline NormalizeStats normalize_corpus(const std::filesystem::path& in_path,
                                       const std::filesystem::path& out_path,
                                       std::size_t workers = 1,
                                       std::size_t block_lines = 1 << 16) {
  auto in = open_input(in_path);
  auto out = open_output(out_path);
  NormalizeStats stats;
  std::vector<std::string> lines;
  while (read_line_block(in, block_lines, lines)) {
    struct Result {
      bool parsed = false;
      NormalizedParagraph paragraph;
      Warnings warnings;
    };
    auto results = parallel_map(std::span<const std::string>(lines), workers,
                                [](const std::string& line) {
                                  Result r;
                                  if (auto p = parse_tagged_line(line, &r.warnings)) {
                                    r.parsed = true;
                                    r.paragraph = normalize_paragraph(*p);
                                  }
                                  return r;
                                });
    for (auto& r : results) {
      stats.warnings.merge(r.warnings);
      if (!r.parsed) continue;
      ++stats.paragraphs_in;
      if (r.paragraph.empty()) continue;
      ++stats.paragraphs_out;
      stats.phrases_appended += r.paragraph.phrase_count;
      out << join(r.paragraph.tokens, " ") << '\n';
    }
  }
  finish_output(out, out_path);
  return stats;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_NORMALIZE_HPP_
