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

#ifndef HYPERDISC_RANK_HPP_
#define HYPERDISC_RANK_HPP_

// Merging per-source candidate lists into the final ranking. Sources are
// concatenated as blocks in priority order; the first occurrence of a term
// wins.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hyperdisc/eval.hpp"

namespace hyperdisc {

class ModuleOrder {
 public:
  // IS-A, co-occurrence, Hearst, then embedding projection.
  ModuleOrder() : order_(kAllSources) {}

  explicit ModuleOrder(std::span<const Source> order) {
    if (order.size() != kAllSources.size()) throw Error("module order must name all 4 sources");
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (order[i] == order[j]) throw Error("module order repeats a source");
      }
      order_[i] = order[i];
    }
  }

  const std::array<Source, 4>& sources() const { return order_; }

  std::string to_string() const {
    std::vector<std::string> names;
    for (Source s : order_) names.emplace_back(hyperdisc::to_string(s));
    return join(names, ",");
  }

  friend bool operator==(const ModuleOrder&, const ModuleOrder&) = default;

 private:
  std::array<Source, 4> order_{};
};

// Parses "isa,cooc,hearst,phi".
inline ModuleOrder parse_module_order(std::string_view text) {
  std::vector<Source> sources;
  for (auto part : split(text, ',')) sources.push_back(parse_source(part));
  return ModuleOrder(sources);
}

using SourceLists = std::map<Source, std::vector<ScoredCandidate>>;

inline RankedPrediction merge(const Query& query, const SourceLists& per_source,
                              const ModuleOrder& order = {}, std::size_t k = kMaxCandidates) {
  RankedPrediction out{query, {}};
  const std::string self = to_internal(query.term);
  std::unordered_set<std::string> emitted;
  for (Source s : order.sources()) {
    auto it = per_source.find(s);
    if (it == per_source.end()) continue;
    for (const auto& c : it->second) {
      if (out.candidates.size() >= k) return out;
      const std::string key = to_internal(c.term);
      if (key == self || !emitted.insert(key).second) continue;
      out.candidates.push_back(c);
    }
  }
  return out;
}

// Sorts sources by score, highest first; ties keep the declared source order.
inline ModuleOrder order_by_scores(const std::map<Source, double>& scores) {
  std::vector<Source> sources(kAllSources.begin(), kAllSources.end());
  std::stable_sort(sources.begin(), sources.end(), [&](Source a, Source b) {
    const double sa = scores.count(a) ? scores.at(a) : 0.0;
    const double sb = scores.count(b) ? scores.at(b) : 0.0;
    return sa > sb;
  });
  return ModuleOrder(sources);
}

// Orders sources by their standalone MRR on training data.
inline ModuleOrder choose_order(
    const std::map<Source, std::vector<std::vector<std::string>>>& per_source_predictions,
    std::span<const GoldSet> train_gold, std::map<Source, double>* scores_out = nullptr) {
  if (train_gold.empty()) throw Error("cannot choose a merge order without training gold data");
  std::map<Source, double> scores;
  for (const auto& [source, predictions] : per_source_predictions) {
    scores[source] = evaluate(predictions, train_gold).mrr;
  }
  if (scores_out) *scores_out = scores;
  return order_by_scores(scores);
}

}  // namespace hyperdisc

#endif  // HYPERDISC_RANK_HPP_
