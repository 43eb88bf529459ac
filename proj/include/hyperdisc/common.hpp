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

#ifndef HYPERDISC_COMMON_HPP_
#define HYPERDISC_COMMON_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hyperdisc {

// All hard failures (malformed input, I/O, contract violations) are reported
// with this exception type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maximum number of candidates reported per query.
inline constexpr std::size_t kMaxCandidates = 15;

enum class QueryKind { Concept, Entity };

inline std::string_view to_string(QueryKind kind) {
  return kind == QueryKind::Concept ? "Concept" : "Entity";
}

// Evidence sources. Declaration order is the default merge priority and the
// tie-break order when sources are ranked by training score.
enum class Source { IsA, Cooc, Hearst, Phi };

inline constexpr std::array<Source, 4> kAllSources = {
    Source::IsA, Source::Cooc, Source::Hearst, Source::Phi};

inline std::string_view to_string(Source source) {
  switch (source) {
    case Source::IsA: return "isa";
    case Source::Cooc: return "cooc";
    case Source::Hearst: return "hearst";
    case Source::Phi: return "phi";
  }
  return "?";
}

inline Source parse_source(std::string_view text) {
  for (Source s : kAllSources) {
    if (to_string(s) == text) return s;
  }
  throw Error("unknown evidence source '" + std::string(text) + "'");
}

struct ScoredCandidate {
  std::string term;  // internal (underscore-joined) form
  double score = 0.0;
  Source source = Source::Cooc;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

struct Query {
  std::string term;  // lowercase, single spaces
  QueryKind kind = QueryKind::Concept;

  friend bool operator==(const Query&, const Query&) = default;
};

struct GoldSet {
  Query query;
  std::vector<std::string> hypernyms;
};

struct RankedPrediction {
  Query query;
  std::vector<ScoredCandidate> candidates;
};

// Counters for recoverable input problems (skipped tokens, rejected lines).
struct Warnings {
  std::size_t count = 0;
  std::vector<std::string> samples;

  void add(std::string message) {
    ++count;
    if (samples.size() < 20) samples.push_back(std::move(message));
  }

  void merge(const Warnings& other) {
    count += other.count;
    for (const auto& s : other.samples) {
      if (samples.size() < 20) samples.push_back(s);
    }
  }
};

// ---------------------------------------------------------------------------
// String helpers. Text is treated as bytes; only ASCII is case-folded.

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

inline std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Splits on runs of whitespace, dropping empty fields.
inline std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

// Splits on every occurrence of `sep`, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename Range>
std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Lowercases and collapses whitespace to single spaces.
inline std::string normalize_term(std::string_view text) {
  return join(split_ws(to_lower(text)), " ");
}

// External "oil plant" -> internal "oil_plant".
inline std::string to_internal(std::string_view term) {
  return join(split_ws(to_lower(term)), "_");
}

// Internal "oil_plant" -> external "oil plant".
inline std::string to_external(std::string_view term) {
  std::string out(term);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

inline std::size_t word_count(std::string_view internal_term) {
  if (internal_term.empty()) return 0;
  return static_cast<std::size_t>(
             std::count(internal_term.begin(), internal_term.end(), '_')) +
         1;
}

// Shortest round-trip decimal form.
template <typename Real>
std::string format_number(Real value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

template <typename Real>
bool parse_number(std::string_view text, Real& value) {
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

// 64-bit FNV-1a; stable across platforms, used for artifact stamps.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_COMMON_HPP_
