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

#ifndef HYPERDISC_COOC_HPP_
#define HYPERDISC_COOC_HPP_

// Co-occurrence evidence.
//
// CoocIndex counts, for each registered query term, the tokens sharing a
// paragraph (one normalized-corpus line) with it. PairIndex counts
// hyponym -> hypernym pairs read from the Hearst and IS-A corpora.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hyperdisc/corpus_io.hpp"
#include "hyperdisc/parallel.hpp"

namespace hyperdisc {

using CountMap = std::unordered_map<std::string, std::uint64_t>;

struct CountEntry {
  std::string key;
  std::string candidate;
  std::uint64_t count = 0;

  friend bool operator==(const CountEntry&, const CountEntry&) = default;
  friend auto operator<=>(const CountEntry&, const CountEntry&) = default;
};

// key -> candidate -> count. Stored counts are always >= 1.
class TermCounts {
 public:
  void add(const std::string& key, const std::string& candidate, std::uint64_t n = 1) {
    if (n == 0) return;
    counts_[key][candidate] += n;
  }

  // Returns nullptr when the key has never been seen.
  const CountMap* find(const std::string& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? nullptr : &it->second;
  }

  std::uint64_t count(const std::string& key, const std::string& candidate) const {
    const CountMap* m = find(key);
    if (!m) return 0;
    auto it = m->find(candidate);
    return it == m->end() ? 0 : it->second;
  }

  void merge(const TermCounts& other) {
    for (const auto& [key, m] : other.counts_) {
      auto& mine = counts_[key];
      for (const auto& [cand, n] : m) mine[cand] += n;
    }
  }

  // Ensures `key` exists, possibly with no candidates.
  void touch(const std::string& key) { counts_.try_emplace(key); }

  std::size_t key_count() const { return counts_.size(); }

  // All (key, candidate, count) triples sorted by (key, candidate).
  std::vector<CountEntry> entries() const {
    std::vector<CountEntry> out;
    for (const auto& [key, m] : counts_) {
      for (const auto& [cand, n] : m) out.push_back({key, cand, n});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const TermCounts& a, const TermCounts& b) {
    return a.entries() == b.entries();
  }

 private:
  std::unordered_map<std::string, CountMap> counts_;
};

class CoocIndex {
 public:
  CoocIndex() = default;
  explicit CoocIndex(const std::vector<std::string>& query_terms) {
    for (const auto& q : query_terms) register_term(q);
  }

  void register_term(const std::string& internal_term) {
    registered_.insert(internal_term);
    counts_.touch(internal_term);
  }

  bool is_registered(const std::string& term) const { return registered_.count(term) > 0; }

  // Counts one paragraph. Each registered term present in the line (however
  // often) adds one count per occurrence of every other token.
  void add_line(std::string_view line) {
    const auto fields = split_ws(line);
    std::vector<std::string> tokens(fields.begin(), fields.end());
    std::vector<const std::string*> present;
    for (const auto& t : tokens) {
      if (!is_registered(t)) continue;
      bool seen = false;
      for (const auto* p : present) seen = seen || *p == t;
      if (!seen) present.push_back(&t);
    }
    for (const auto* q : present) {
      for (const auto& t : tokens) {
        if (t != *q) counts_.add(*q, t);
      }
    }
  }

  // Adds a raw count for `q`, registering it if needed.
  void add_count(const std::string& q, const std::string& t, std::uint64_t n) {
    register_term(q);
    counts_.add(q, t, n);
  }

  void merge(const CoocIndex& other) {
    for (const auto& q : other.registered_) register_term(q);
    counts_.merge(other.counts_);
  }

  const CountMap* find(const std::string& term) const { return counts_.find(term); }
  std::uint64_t count(const std::string& q, const std::string& t) const {
    return counts_.count(q, t);
  }
  std::vector<CountEntry> entries() const { return counts_.entries(); }
  std::size_t term_count() const { return registered_.size(); }

  friend bool operator==(const CoocIndex& a, const CoocIndex& b) {
    return a.counts_ == b.counts_;
  }

 private:
  std::unordered_set<std::string> registered_;
  TermCounts counts_;
};

// Shard-parallel count over a block of lines; partial indexes are summed.
inline CoocIndex count_cooc_lines(std::span<const std::string> lines,
                                  const std::vector<std::string>& query_terms,
                                  std::size_t workers = 1) {
  std::vector<CoocIndex> partial(std::max<std::size_t>(1, workers), CoocIndex(query_terms));
  parallel_shards(lines.size(), partial.size(),
                  [&](std::size_t shard, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) partial[shard].add_line(lines[i]);
                  });
  CoocIndex out(query_terms);
  for (const auto& p : partial) out.merge(p);
  return out;
}

inline CoocIndex build_cooc_index(const std::filesystem::path& normalized_corpus,
                                  const std::vector<std::string>& query_terms,
                                  std::size_t workers = 1,
                                  std::size_t block_lines = 1 << 16) {
  auto in = open_input(normalized_corpus);
  CoocIndex index(query_terms);
  std::vector<std::string> lines;
  while (read_line_block(in, block_lines, lines)) {
    index.merge(count_cooc_lines(lines, query_terms, workers));
  }
  return index;
}

inline constexpr std::string_view kCoocIndexHeader = "#cooc-index v1";

inline void save_cooc_index(const std::filesystem::path& path, const CoocIndex& index) {
  auto out = open_output(path);
  out << kCoocIndexHeader << '\n';
  for (const auto& e : index.entries()) {
    out << e.key << '\t' << e.candidate << '\t' << e.count << '\n';
  }
  finish_output(out, path);
}

inline CoocIndex load_cooc_index(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kCoocIndexHeader) {
    throw Error(path.string() + ": missing '" + std::string(kCoocIndexHeader) + "' header");
  }
  CoocIndex index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split(strip_cr(line), '\t');
    std::uint64_t n = 0;
    if (f.size() != 3 || f[0].empty() || f[1].empty() ||
        std::from_chars(f[2].data(), f[2].data() + f[2].size(), n).ec != std::errc() ||
        n == 0) {
      throw Error(path.string() + ": malformed index line " + std::to_string(line_no));
    }
    index.add_count(std::string(f[0]), std::string(f[1]), n);
  }
  return index;
}

// ---------------------------------------------------------------------------
// Pattern pair evidence.

enum class PairKind { Hearst, IsA };

// hyponym -> hypernym -> count.
using PairIndex = TermCounts;

// Hearst lines `hypernym<TAB>h1,h2,...` add one count per (h_i, hypernym);
// IS-A lines `hyponym<TAB>hypernym` add one count. Malformed lines are
// skipped and counted.
inline void add_pair_line(PairIndex& index, std::string_view raw, PairKind kind,
                          Warnings* warnings = nullptr, std::size_t line_no = 0) {
  const auto line = strip_cr(raw);
  if (line.empty()) return;
  auto reject = [&] {
    if (warnings) warnings->add("line " + std::to_string(line_no) + ": malformed pair line");
  };
  const auto f = split(line, '\t');
  if (f.size() != 2 || f[0].empty() || f[1].empty()) return reject();
  if (kind == PairKind::IsA) {
    if (f[0] == f[1]) return reject();
    index.add(std::string(f[0]), std::string(f[1]));
    return;
  }
  const std::string hypernym(f[0]);
  const auto hyponyms = split(f[1], ',');
  for (auto h : hyponyms) {
    if (h.empty() || h == f[0]) return reject();
  }
  for (auto h : hyponyms) index.add(std::string(h), hypernym);
}

inline PairIndex build_pair_index(const std::filesystem::path& path, PairKind kind,
                                  Warnings* warnings = nullptr) {
  auto in = open_input(path);
  PairIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) add_pair_line(index, line, kind, warnings, ++line_no);
  return index;
}

// ---------------------------------------------------------------------------
// Candidate lists.

// Candidates whose count is strictly above `floor`, vocabulary-filtered when
// `vocab` is non-null, ordered by count descending then term ascending.
inline std::vector<ScoredCandidate> rank_counts(const CountMap* counts, std::uint64_t floor,
                                                const CandidateVocabulary* vocab,
                                                std::size_t k, Source source) {
  std::vector<std::pair<std::uint64_t, const std::string*>> kept;
  if (counts) {
    for (const auto& [term, n] : *counts) {
      if (n <= floor) continue;
      if (vocab && !vocab->contains(term)) continue;
      kept.emplace_back(n, &term);
    }
  }
  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : *a.second < *b.second;
  };
  const std::size_t take = std::min(k, kept.size());
  std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(take), kept.end(),
                    better);
  std::vector<ScoredCandidate> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({*kept[i].second, static_cast<double>(kept[i].first), source});
  }
  return out;
}

inline constexpr std::uint64_t kDefaultCoocThreshold = 5;

inline std::vector<ScoredCandidate> candidates_from_cooc(
    const CoocIndex& index, const std::string& query_term, const CandidateVocabulary* vocab,
    std::uint64_t threshold = kDefaultCoocThreshold, std::size_t k = kMaxCandidates) {
  return rank_counts(index.find(query_term), threshold, vocab, k, Source::Cooc);
}

inline std::vector<ScoredCandidate> candidates_from_pairs(const PairIndex& index,
                                                          const std::string& query_term,
                                                          const CandidateVocabulary* vocab,
                                                          std::size_t k = kMaxCandidates,
                                                          Source source = Source::Hearst) {
  if (k == 0) throw Error("candidate list size k must be at least 1");
  return rank_counts(index.find(query_term), 0, vocab, k, source);
}

inline constexpr double kHeadWordScore = 0.5;

// For a multiword concept, its head (last) word is proposed as a hypernym.
inline std::optional<ScoredCandidate> head_word_heuristic(const Query& query,
                                                          const CandidateVocabulary* vocab = nullptr) {
  if (query.kind != QueryKind::Concept) return std::nullopt;
  const auto words = split_ws(query.term);
  if (words.size() < 2 || words.size() > 3) return std::nullopt;
  std::string head = to_lower(words.back());
  if (vocab && !vocab->contains(head)) return std::nullopt;
  return ScoredCandidate{std::move(head), kHeadWordScore, Source::IsA};
}

// IS-A module output: pair counts first, then the head-word guess if there
// is room and it is not already listed.
inline std::vector<ScoredCandidate> candidates_from_isa(const PairIndex& index, const Query& query,
                                                        const CandidateVocabulary* vocab,
                                                        std::size_t k = kMaxCandidates) {
  auto out = candidates_from_pairs(index, to_internal(query.term), vocab, k, Source::IsA);
  if (auto head = head_word_heuristic(query, vocab); head && out.size() < k) {
    const bool listed = std::any_of(out.begin(), out.end(),
                                    [&](const ScoredCandidate& c) { return c.term == head->term; });
    if (!listed) out.push_back(std::move(*head));
  }
  return out;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_COOC_HPP_
