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

#ifndef HYPERDISC_PATTERNS_HPP_
#define HYPERDISC_PATTERNS_HPP_

// Lexico-syntactic hypernym patterns over POS-tagged paragraphs.
//
// Hearst patterns (NP-list = NP (, NP)* ((,)? (and|or) NP)?):
//   SuchAs      NP such as NP-list
//   SuchNPAs    such NP as NP-list
//   Including   NP ,? including NP-list
//   Especially  NP ,? especially NP-list
//   OrOther     NP-list ,? or other NP
//   AndOther    NP-list ,? and other NP
// IS-A pattern:
//   IsA         NP is (a|an|the) NP      (left = hyponym, right = hypernym)
//
// Trigger words are matched on the lowercased surface, ignoring the tag.

#include <algorithm>
#include <array>
#include <filesystem>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "hyperdisc/normalize.hpp"

namespace hyperdisc {

enum class PatternId { SuchAs, SuchNPAs, Including, Especially, OrOther, AndOther, IsA };

inline constexpr std::array<PatternId, 6> kHearstPatterns = {
    PatternId::SuchAs,    PatternId::SuchNPAs, PatternId::Including,
    PatternId::Especially, PatternId::OrOther, PatternId::AndOther};

inline std::string_view to_string(PatternId id) {
  switch (id) {
    case PatternId::SuchAs: return "such-as";
    case PatternId::SuchNPAs: return "such-np-as";
    case PatternId::Including: return "including";
    case PatternId::Especially: return "especially";
    case PatternId::OrOther: return "or-other";
    case PatternId::AndOther: return "and-other";
    case PatternId::IsA: return "is-a";
  }
  return "?";
}

struct PatternMatch {
  PatternId pattern_id = PatternId::SuchAs;
  std::string hypernym;               // internal form
  std::vector<std::string> hyponyms;  // internal form, non-empty
  std::size_t begin = 0;              // token span in the source paragraph
  std::size_t end = 0;

  friend bool operator==(const PatternMatch&, const PatternMatch&) = default;
};

struct NpMatch {
  NounPhrase phrase;
  std::size_t end = 0;  // one past the last consumed token
};

inline constexpr std::size_t kMaxPhraseWords = 3;

namespace detail {

inline bool surface_is(const TaggedToken& token, std::string_view word) {
  if (token.surface.size() != word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    char c = token.surface[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != word[i]) return false;
  }
  return true;
}

inline bool at(std::span<const TaggedToken> tokens, std::size_t i, std::size_t limit,
               std::string_view word) {
  return i < limit && i < tokens.size() && surface_is(tokens[i], word);
}

inline bool is_article(const TaggedToken& token) {
  return surface_is(token, "a") || surface_is(token, "an") || surface_is(token, "the");
}

inline bool is_determiner(const TaggedToken& token) {
  return token.pos == "DT" || is_article(token);
}

inline bool is_np_content(const TaggedToken& token) {
  return is_chunkable(token.pos) && !clean_word(token.surface).empty();
}

}  // namespace detail

// Optional determiner, then up to three adjective/noun tokens; the phrase
// ends at the last noun inside that window. Tokens at or beyond `limit` are
// treated as absent.
inline std::optional<NpMatch> match_np(std::span<const TaggedToken> tokens,
                                       std::size_t start,
                                       std::size_t limit = static_cast<std::size_t>(-1)) {
  limit = std::min(limit, tokens.size());
  std::size_t i = start;
  if (i < limit && detail::is_determiner(tokens[i])) ++i;
  const std::size_t content = i;
  std::size_t last_noun = content;  // exclusive end; == content means none
  while (i < limit && i - content < kMaxPhraseWords && detail::is_np_content(tokens[i])) {
    if (is_noun(tokens[i].pos)) last_noun = i + 1;
    ++i;
  }
  if (last_noun == content) return std::nullopt;
  NpMatch m;
  m.phrase.begin = content;
  for (std::size_t j = content; j < last_noun; ++j) {
    m.phrase.words.push_back(clean_word(tokens[j].surface));
  }
  m.phrase.head_index = m.phrase.words.size() - 1;
  m.end = last_noun;
  return m;
}

inline std::optional<NpMatch> match_np(const TaggedParagraph& paragraph, std::size_t start) {
  return match_np(std::span<const TaggedToken>(paragraph.tokens), start);
}

struct NpList {
  std::vector<std::string> terms;
  std::size_t end = 0;
};

inline std::optional<NpList> match_np_list(std::span<const TaggedToken> tokens,
                                           std::size_t start, std::size_t limit) {
  using detail::at;
  auto first = match_np(tokens, start, limit);
  if (!first) return std::nullopt;
  NpList list{{first->phrase.joined()}, first->end};
  std::size_t pos = first->end;
  while (at(tokens, pos, limit, ",")) {
    auto next = match_np(tokens, pos + 1, limit);
    if (!next) break;
    list.terms.push_back(next->phrase.joined());
    pos = next->end;
  }
  std::size_t conj = pos;
  if (at(tokens, conj, limit, ",")) ++conj;
  if (at(tokens, conj, limit, "and") || at(tokens, conj, limit, "or")) {
    if (auto last = match_np(tokens, conj + 1, limit)) {
      list.terms.push_back(last->phrase.joined());
      pos = last->end;
    }
  }
  list.end = pos;
  return list;
}

namespace detail {

inline std::optional<PatternMatch> make_match(PatternId id, std::string hypernym,
                                              const std::vector<std::string>& hyponyms,
                                              std::size_t begin, std::size_t end) {
  PatternMatch m{id, std::move(hypernym), {}, begin, end};
  for (const auto& h : hyponyms) {
    if (h == m.hypernym) continue;
    if (std::find(m.hyponyms.begin(), m.hyponyms.end(), h) != m.hyponyms.end()) continue;
    m.hyponyms.push_back(h);
  }
  if (m.hyponyms.empty()) return std::nullopt;
  return m;
}

// Patterns whose hypernym precedes the hyponym list.
inline std::optional<PatternMatch> match_hypernym_first(std::span<const TaggedToken> tokens,
                                                        std::size_t pos, PatternId id) {
  const std::size_t n = tokens.size();
  std::optional<NpMatch> hyper;
  std::size_t list_start = 0;
  switch (id) {
    case PatternId::SuchAs:
      hyper = match_np(tokens, pos);
      if (!hyper || !at(tokens, hyper->end, n, "such") || !at(tokens, hyper->end + 1, n, "as")) {
        return std::nullopt;
      }
      list_start = hyper->end + 2;
      break;
    case PatternId::SuchNPAs:
      if (!at(tokens, pos, n, "such")) return std::nullopt;
      hyper = match_np(tokens, pos + 1);
      if (!hyper || !at(tokens, hyper->end, n, "as")) return std::nullopt;
      list_start = hyper->end + 1;
      break;
    case PatternId::Including:
    case PatternId::Especially: {
      const std::string_view trigger = id == PatternId::Including ? "including" : "especially";
      hyper = match_np(tokens, pos);
      if (!hyper) return std::nullopt;
      std::size_t t = hyper->end;
      if (at(tokens, t, n, ",")) ++t;
      if (!at(tokens, t, n, trigger)) return std::nullopt;
      list_start = t + 1;
      break;
    }
    default:
      return std::nullopt;
  }
  auto list = match_np_list(tokens, list_start, n);
  if (!list) return std::nullopt;
  return make_match(id, hyper->phrase.joined(), list->terms, pos, list->end);
}

inline constexpr std::size_t kMaxListLookback = 48;

}  // namespace detail

// All non-overlapping matches of one pattern, left to right.
inline std::vector<PatternMatch> extract_pattern(const TaggedParagraph& paragraph, PatternId id) {
  using detail::at;
  const std::span<const TaggedToken> tokens(paragraph.tokens);
  const std::size_t n = tokens.size();
  std::vector<PatternMatch> out;

  if (id == PatternId::IsA) {
    std::size_t pos = 0;
    while (pos < n) {
      auto hypo = match_np(tokens, pos);
      if (hypo && at(tokens, hypo->end, n, "is") && hypo->end + 1 < n &&
          detail::is_article(tokens[hypo->end + 1])) {
        // match_np consumes the article as the optional determiner.
        if (auto hyper = match_np(tokens, hypo->end + 1)) {
          if (auto m = detail::make_match(id, hyper->phrase.joined(), {hypo->phrase.joined()},
                                          pos, hyper->end)) {
            out.push_back(std::move(*m));
            pos = hyper->end;
            continue;
          }
        }
      }
      ++pos;
    }
    return out;
  }

  if (id == PatternId::OrOther || id == PatternId::AndOther) {
    const std::string_view conj = id == PatternId::OrOther ? "or" : "and";
    std::size_t floor = 0;  // matches may not overlap
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (i < floor || !at(tokens, i, n, conj) || !at(tokens, i + 1, n, "other")) continue;
      auto hyper = match_np(tokens, i + 2);
      if (!hyper) continue;
      const std::size_t lo = std::max(floor, i > detail::kMaxListLookback
                                                 ? i - detail::kMaxListLookback
                                                 : std::size_t{0});
      for (std::size_t s = lo; s < i; ++s) {
        auto list = match_np_list(tokens, s, i);
        if (!list) continue;
        // `NP, NP, and other NP`: a serial comma may precede the trigger.
        if (list->end != i && !(list->end + 1 == i && at(tokens, list->end, n, ","))) continue;
        if (auto m = detail::make_match(id, hyper->phrase.joined(), list->terms, s, hyper->end)) {
          floor = m->end;
          out.push_back(std::move(*m));
        }
        break;
      }
    }
    return out;
  }

  std::size_t pos = 0;
  while (pos < n) {
    if (auto m = detail::match_hypernym_first(tokens, pos, id)) {
      pos = m->end;
      out.push_back(std::move(*m));
    } else {
      ++pos;
    }
  }
  return out;
}

// Matches of all six Hearst patterns, ordered by start offset.
inline std::vector<PatternMatch> extract_hearst(const TaggedParagraph& paragraph) {
  std::vector<PatternMatch> out;
  for (PatternId id : kHearstPatterns) {
    auto found = extract_pattern(paragraph, id);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PatternMatch& a, const PatternMatch& b) { return a.begin < b.begin; });
  return out;
}

inline std::vector<PatternMatch> extract_isa(const TaggedParagraph& paragraph) {
  return extract_pattern(paragraph, PatternId::IsA);
}

// `hypernym<TAB>h1,h2,...`
inline std::string format_hearst_line(const PatternMatch& m) {
  return m.hypernym + '\t' + join(m.hyponyms, ",");
}

// `hyponym<TAB>hypernym`
inline std::string format_isa_line(const PatternMatch& m) {
  return m.hyponyms.front() + '\t' + m.hypernym;
}

struct ExtractStats {
  std::size_t paragraphs = 0;
  std::size_t hearst_matches = 0;
  std::size_t isa_matches = 0;
  Warnings warnings;
};

// Writes the Hearst and/or IS-A corpus for a tagged corpus. An empty path
// disables that output.
inline ExtractStats extract_corpus(const std::filesystem::path& in_path,
                                   const std::filesystem::path& hearst_out,
                                   const std::filesystem::path& isa_out,
                                   std::size_t workers = 1,
                                   std::size_t block_lines = 1 << 16) {
  auto in = open_input(in_path);
  std::optional<std::ofstream> hearst;
  std::optional<std::ofstream> isa;
  if (!hearst_out.empty()) hearst = open_output(hearst_out);
  if (!isa_out.empty()) isa = open_output(isa_out);

  struct Result {
    std::vector<PatternMatch> hearst;
    std::vector<PatternMatch> isa;
    Warnings warnings;
    bool parsed = false;
  };
  ExtractStats stats;
  std::vector<std::string> lines;
  const bool want_hearst = hearst.has_value();
  const bool want_isa = isa.has_value();
  while (read_line_block(in, block_lines, lines)) {
    auto results = parallel_map(std::span<const std::string>(lines), workers,
                                [&](const std::string& line) {
                                  Result r;
                                  if (auto p = parse_tagged_line(line, &r.warnings)) {
                                    r.parsed = true;
                                    if (want_hearst) r.hearst = extract_hearst(*p);
                                    if (want_isa) r.isa = extract_isa(*p);
                                  }
                                  return r;
                                });
    for (const auto& r : results) {
      stats.warnings.merge(r.warnings);
      if (r.parsed) ++stats.paragraphs;
      for (const auto& m : r.hearst) *hearst << format_hearst_line(m) << '\n';
      for (const auto& m : r.isa) *isa << format_isa_line(m) << '\n';
      stats.hearst_matches += r.hearst.size();
      stats.isa_matches += r.isa.size();
    }
  }
  if (hearst) finish_output(*hearst, hearst_out);
  if (isa) finish_output(*isa, isa_out);
  return stats;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_PATTERNS_HPP_
