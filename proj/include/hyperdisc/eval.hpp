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

#ifndef HYPERDISC_EVAL_HPP_
#define HYPERDISC_EVAL_HPP_

// Ranking metrics over candidate lists: MRR, MAP and P@{1,3,5,15}.
// Terms compare equal after lowercasing, whitespace collapsing and treating
// '_' as a space; there is no lemmatization.

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyperdisc/corpus_io.hpp"

namespace hyperdisc {

inline constexpr std::array<int, 4> kPrecisionCutoffs = {1, 3, 5, 15};

enum class PrecisionMode {
  Fixed,       // hits / k
  Normalized,  // hits / min(k, |gold|)
};

inline PrecisionMode parse_precision_mode(std::string_view text) {
  if (text == "fixed") return PrecisionMode::Fixed;
  if (text == "normalized") return PrecisionMode::Normalized;
  throw Error("unknown precision mode '" + std::string(text) + "' (expected fixed or normalized)");
}

inline std::string match_key(std::string_view term) { return normalize_term(to_external(term)); }

namespace detail {

inline std::unordered_set<std::string> gold_keys(std::span<const std::string> gold) {
  if (gold.empty()) throw Error("gold hypernym list is empty");
  std::unordered_set<std::string> keys;
  for (const auto& g : gold) keys.insert(match_key(g));
  return keys;
}

// Per-position hit flags for the first `limit` predictions. A gold term
// counts once even if predicted twice.
inline std::vector<bool> hit_flags(std::span<const std::string> predicted,
                                   const std::unordered_set<std::string>& gold,
                                   std::size_t limit) {
  std::vector<bool> hits;
  std::unordered_set<std::string> found;
  for (std::size_t i = 0; i < predicted.size() && i < limit; ++i) {
    auto key = match_key(predicted[i]);
    hits.push_back(gold.count(key) > 0 && found.insert(key).second);
  }
  return hits;
}

}  // namespace detail

inline double reciprocal_rank(std::span<const std::string> predicted,
                              std::span<const std::string> gold) {
  const auto hits = detail::hit_flags(predicted, detail::gold_keys(gold), kMaxCandidates);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i]) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

// (1 / min(|gold|, 15)) * sum over hit positions i of hits_up_to_i / i.
inline double average_precision(std::span<const std::string> predicted,
                                std::span<const std::string> gold) {
  const auto keys = detail::gold_keys(gold);
  const auto hits = detail::hit_flags(predicted, keys, kMaxCandidates);
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    ++found;
    sum += static_cast<double>(found) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(std::min(keys.size(), kMaxCandidates));
}

inline double precision_at_k(std::span<const std::string> predicted,
                             std::span<const std::string> gold, int k,
                             PrecisionMode mode = PrecisionMode::Fixed) {
  if (k <= 0) throw Error("precision cutoff k must be positive");
  const auto keys = detail::gold_keys(gold);
  const auto hits = detail::hit_flags(predicted, keys, static_cast<std::size_t>(k));
  const auto n = static_cast<double>(std::count(hits.begin(), hits.end(), true));
  const double denom = mode == PrecisionMode::Fixed
                           ? static_cast<double>(k)
                           : static_cast<double>(std::min<std::size_t>(k, keys.size()));
  return n / denom;
}

struct MetricsReport {
  double mrr = 0.0;
  double map = 0.0;
  std::map<int, double> p_at;
  std::size_t n_queries = 0;
  std::optional<QueryKind> kind_filter;
};

inline MetricsReport evaluate(std::span<const std::vector<std::string>> predictions,
                              std::span<const GoldSet> gold,
                              std::optional<QueryKind> kind_filter = std::nullopt,
                              PrecisionMode mode = PrecisionMode::Fixed) {
  if (predictions.size() != gold.size()) {
    throw Error("prediction count " + std::to_string(predictions.size()) +
                " does not match gold count " + std::to_string(gold.size()));
  }
  MetricsReport r;
  r.kind_filter = kind_filter;
  for (int k : kPrecisionCutoffs) r.p_at[k] = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (kind_filter && gold[i].query.kind != *kind_filter) continue;
    ++r.n_queries;
    r.mrr += reciprocal_rank(predictions[i], gold[i].hypernyms);
    r.map += average_precision(predictions[i], gold[i].hypernyms);
    for (int k : kPrecisionCutoffs) {
      r.p_at[k] += precision_at_k(predictions[i], gold[i].hypernyms, k, mode);
    }
  }
  if (r.n_queries > 0) {
    const auto n = static_cast<double>(r.n_queries);
    r.mrr /= n;
    r.map /= n;
    for (auto& [k, v] : r.p_at) v /= n;
  }
  return r;
}

// (name, value) rows in table order.
inline std::vector<std::pair<std::string, double>> metric_rows(const MetricsReport& r) {
  std::vector<std::pair<std::string, double>> rows{{"MRR", r.mrr}, {"MAP", r.map}};
  for (int k : kPrecisionCutoffs) rows.emplace_back("P@" + std::to_string(k), r.p_at.at(k));
  return rows;
}

inline std::string format_fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// Aligned table, one column per report.
inline std::string format_report_table(
    std::span<const std::pair<std::string, MetricsReport>> columns) {
  std::string out = "      ";
  for (const auto& [name, r] : columns) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %8s", name.c_str());
    out += buf;
  }
  out += '\n';
  if (columns.empty()) return out;
  const auto names = metric_rows(columns.front().second);
  for (std::size_t row = 0; row < names.size(); ++row) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-6s", names[row].first.c_str());
    out += buf;
    for (const auto& col : columns) {
      std::snprintf(buf, sizeof(buf), " %8s", format_fixed3(metric_rows(col.second)[row].second).c_str());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

// `metric<TAB>value` lines, values to 3 decimals.
inline void write_metrics_report(const std::filesystem::path& path, const MetricsReport& r) {
  auto out = open_output(path);
  for (const auto& [name, v] : metric_rows(r)) out << name << '\t' << format_fixed3(v) << '\n';
  finish_output(out, path);
}

inline std::map<std::string, double> read_metrics_report(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto f = split(strip_cr(line), '\t');
    double v = 0;
    if (f.size() != 2 || !parse_number(f[1], v)) throw Error(path.string() + ": malformed metrics line");
    out[std::string(f[0])] = v;
  }
  return out;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_EVAL_HPP_
