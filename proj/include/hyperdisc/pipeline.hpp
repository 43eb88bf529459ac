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

#ifndef HYPERDISC_PIPELINE_HPP_
#define HYPERDISC_PIPELINE_HPP_

// End-to-end pipeline stages. Every stage reads its inputs from the
// configuration and writes one artifact (plus a `.stamp` sidecar recording
// the stage name and a hash of the configuration it was built from) into
// the output directory. Downstream stages refuse missing or stale artifacts.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperdisc/cooc.hpp"
#include "hyperdisc/corpus_io.hpp"
#include "hyperdisc/embedding.hpp"
#include "hyperdisc/eval.hpp"
#include "hyperdisc/normalize.hpp"
#include "hyperdisc/patterns.hpp"
#include "hyperdisc/rank.hpp"

namespace hyperdisc {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
  bool is_path = false;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"corpus", "", "POS-tagged corpus, one `surface_POS` paragraph per line", true},
      {"vocabulary", "", "candidate hypernym vocabulary, one term per line", true},
      {"queries", "", "test queries, `term<TAB>Concept|Entity`", true},
      {"gold", "", "test gold hypernyms, tab-separated per query", true},
      {"train-queries", "", "training queries (for fit-phi and trained merge order)", true},
      {"train-gold", "", "training gold hypernyms", true},
      {"out-dir", "out", "directory for stage artifacts", true},
      {"predictions", "", "evaluate this predictions file instead of the predict artifact", true},
      {"threshold", "5", "co-occurrence counts must be strictly greater than this"},
      {"k", "15", "candidates per query (at most 15)"},
      {"vocab-filter", "on", "restrict candidates to the vocabulary (on|off)"},
      {"dim", "300", "embedding dimension"},
      {"window", "10", "CBOW context window on each side"},
      {"min-count", "5", "minimum token frequency kept in the embedding"},
      {"negatives", "5", "negative samples per CBOW example"},
      {"epochs", "5", "training epochs"},
      {"lr", "0.025", "initial learning rate (decays linearly to 10%)"},
      {"seed", "", "random seed (required by train-embedding)"},
      {"phi-mode", "offset", "phi transform: offset|matrix"},
      {"ridge", "1e-6", "ridge regularizer for matrix phi"},
      {"merge-order", "default", "default | trained | comma list such as isa,cooc,hearst,phi"},
      {"kind-filter", "all", "evaluate all|concept|entity queries"},
      {"precision", "fixed", "P@k denominator: fixed (k) | normalized (min(k,|gold|))"},
      {"workers", "1", "worker threads; 1 gives fully deterministic output"},
  };
  return keys;
}

inline const ConfigKey* find_config_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

class PipelineConfig {
 public:
  PipelineConfig() {
    for (const auto& k : config_keys()) values_[std::string(k.name)] = std::string(k.default_value);
  }

  // Flat `key=value` lines; '#' starts a comment line. Relative paths are
  // resolved against the file's directory.
  static PipelineConfig from_file(const std::filesystem::path& path) {
    PipelineConfig config;
    config.merge_file(path);
    return config;
  }

  void merge_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    const auto base = path.parent_path();
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto line = normalize_ws_edges(strip_cr(raw));
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const auto key = normalize_ws_edges(line.substr(0, eq));
      std::string value(normalize_ws_edges(line.substr(eq + 1)));
      const ConfigKey* spec = find_config_key(key);
      if (!spec) {
        throw Error(path.string() + ":" + std::to_string(line_no) + ": unknown key '" +
                    std::string(key) + "'");
      }
      if (spec->is_path && !value.empty() && std::filesystem::path(value).is_relative()) {
        value = (base / value).lexically_normal().string();
      }
      values_[std::string(key)] = value;
    }
  }

  void set(std::string_view key, std::string value) {
    if (!find_config_key(key)) throw Error("unknown configuration key '" + std::string(key) + "'");
    values_[std::string(key)] = std::move(value);
  }

  const std::string& get(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) throw Error("unknown configuration key '" + std::string(key) + "'");
    return it->second;
  }

  bool has(std::string_view key) const { return !get(key).empty(); }

  std::filesystem::path path(std::string_view key) const {
    if (!has(key)) throw Error("configuration key '" + std::string(key) + "' is not set");
    return get(key);
  }

  template <typename T>
  T number(std::string_view key) const {
    T v{};
    if (!parse_number(std::string_view(get(key)), v)) {
      throw Error("configuration key '" + std::string(key) + "' is not a valid number: '" +
                  get(key) + "'");
    }
    return v;
  }

  bool flag(std::string_view key) const {
    const auto& v = get(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw Error("configuration key '" + std::string(key) + "' must be on or off");
  }

  std::filesystem::path out_dir() const { return get("out-dir"); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string_view normalize_ws_edges(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
  }

  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Stages and their artifacts.

enum class Stage { Normalize, ExtractHearst, ExtractIsa, TrainEmbedding, CoocIndex, FitPhi, Predict, Evaluate };

inline constexpr std::array<Stage, 8> kPipelineStages = {
    Stage::Normalize,  Stage::ExtractHearst, Stage::ExtractIsa, Stage::TrainEmbedding,
    Stage::CoocIndex,  Stage::FitPhi,        Stage::Predict,    Stage::Evaluate};

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Normalize: return "normalize";
    case Stage::ExtractHearst: return "extract-hearst";
    case Stage::ExtractIsa: return "extract-isa";
    case Stage::TrainEmbedding: return "train-embedding";
    case Stage::CoocIndex: return "cooc-index";
    case Stage::FitPhi: return "fit-phi";
    case Stage::Predict: return "predict";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kPipelineStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

inline std::string_view artifact_name(Stage s) {
  switch (s) {
    case Stage::Normalize: return "normalized.txt";
    case Stage::ExtractHearst: return "hearst.txt";
    case Stage::ExtractIsa: return "isa.txt";
    case Stage::TrainEmbedding: return "embedding.txt";
    case Stage::CoocIndex: return "cooc.idx";
    case Stage::FitPhi: return "phi.txt";
    case Stage::Predict: return "predictions.txt";
    case Stage::Evaluate: return "metrics.tsv";
  }
  return "?";
}

inline std::filesystem::path artifact_path(const PipelineConfig& config, Stage s) {
  return config.out_dir() / artifact_name(s);
}

namespace detail {

struct StageInputs {
  std::vector<std::string_view> keys;
  std::vector<Stage> upstream;
};

inline StageInputs stage_inputs(Stage s) {
  switch (s) {
    case Stage::Normalize:
    case Stage::ExtractHearst:
    case Stage::ExtractIsa:
      return {{"corpus"}, {}};
    case Stage::TrainEmbedding:
      return {{"dim", "window", "min-count", "negatives", "epochs", "lr", "seed"}, {Stage::Normalize}};
    case Stage::CoocIndex:
      return {{"queries", "train-queries"}, {Stage::Normalize}};
    case Stage::FitPhi:
      return {{"phi-mode", "ridge", "train-queries", "train-gold"}, {Stage::TrainEmbedding}};
    case Stage::Predict:
      return {{"vocabulary", "vocab-filter", "queries", "threshold", "k", "merge-order",
               "train-queries", "train-gold"},
              {Stage::CoocIndex, Stage::ExtractHearst, Stage::ExtractIsa, Stage::TrainEmbedding,
               Stage::FitPhi}};
    case Stage::Evaluate:
      return {{"queries", "gold", "kind-filter", "precision", "predictions"}, {Stage::Predict}};
  }
  return {};
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

// Hash of everything that determines a stage's artifact: its own settings
// and, recursively, those of its upstream stages.
inline std::string stage_hash(const PipelineConfig& config, Stage s) {
  const auto inputs = detail::stage_inputs(s);
  std::string canon = "stage=" + std::string(stage_name(s)) + "\n";
  for (auto key : inputs.keys) canon += std::string(key) + "=" + config.get(key) + "\n";
  for (Stage up : inputs.upstream) {
    canon += "upstream:" + std::string(stage_name(up)) + "=" + stage_hash(config, up) + "\n";
  }
  return detail::hex64(fnv1a64(canon));
}

inline std::filesystem::path stamp_path(const std::filesystem::path& artifact) {
  return artifact.string() + ".stamp";
}

inline void write_stamp(const PipelineConfig& config, Stage s) {
  const auto path = stamp_path(artifact_path(config, s));
  auto out = open_output(path);
  out << "stage\t" << stage_name(s) << "\nconfig-hash\t" << stage_hash(config, s) << '\n';
  finish_output(out, path);
}

// Throws unless stage `s` has a current artifact for this configuration.
inline std::filesystem::path require_artifact(const PipelineConfig& config, Stage s) {
  const auto artifact = artifact_path(config, s);
  const auto stamp = stamp_path(artifact);
  const std::string name(stage_name(s));
  if (!std::filesystem::exists(artifact) || !std::filesystem::exists(stamp)) {
    throw Error("missing artifact " + artifact.string() + " from stage `" + name +
                "`; run `hyperdisc " + name + "` first");
  }
  auto in = open_input(stamp);
  std::string line;
  std::string recorded;
  while (std::getline(in, line)) {
    const auto f = split(strip_cr(line), '\t');
    if (f.size() == 2 && f[0] == "config-hash") recorded = std::string(f[1]);
  }
  if (recorded != stage_hash(config, s)) {
    throw Error("stale artifact " + artifact.string() + ": stage `" + name +
                "` was built with a different configuration; rerun `hyperdisc " + name + "`");
  }
  return artifact;
}

// ---------------------------------------------------------------------------
// Stage runners.

namespace detail {

inline std::vector<Query> load_optional_queries(const PipelineConfig& config, std::string_view key) {
  if (!config.has(key)) return {};
  return load_queries(config.path(key));
}

inline std::vector<std::string> query_terms(const PipelineConfig& config) {
  std::vector<std::string> terms;
  std::unordered_set<std::string> seen;
  for (auto key : {"queries", "train-queries"}) {
    for (const auto& q : load_optional_queries(config, key)) {
      auto t = to_internal(q.term);
      if (seen.insert(t).second) terms.push_back(std::move(t));
    }
  }
  if (terms.empty()) throw Error("no queries configured; set `queries`");
  return terms;
}

inline std::size_t workers(const PipelineConfig& config) {
  const auto w = config.number<std::size_t>("workers");
  if (w == 0) throw Error("workers must be at least 1");
  return w;
}

inline std::filesystem::path side_path(const std::filesystem::path& artifact, std::string_view tag) {
  auto p = artifact;
  p.replace_extension(std::string(".") + std::string(tag) + artifact.extension().string());
  return p;
}

}  // namespace detail

inline EmbeddingConfig embedding_config(const PipelineConfig& config) {
  EmbeddingConfig e;
  e.dimension = config.number<std::size_t>("dim");
  e.window = config.number<std::size_t>("window");
  e.min_count = config.number<std::uint64_t>("min-count");
  e.negatives = config.number<std::size_t>("negatives");
  e.epochs = config.number<std::size_t>("epochs");
  e.learning_rate = config.number<double>("lr");
  if (!config.has("seed")) throw Error("--seed is required for train-embedding");
  e.seed = config.number<std::uint64_t>("seed");
  e.workers = detail::workers(config);
  e.validate();
  return e;
}

inline std::filesystem::path frequency_path(const PipelineConfig& config) {
  return config.out_dir() / "embedding.freq";
}

// Candidate lists from all four evidence sources for one query.
struct EvidenceSet {
  std::optional<CandidateVocabulary> vocab;
  CoocIndex cooc;
  PairIndex hearst;
  PairIndex isa;
  EmbeddingModel embedding;
  PhiTransform phi;
  std::uint64_t threshold = kDefaultCoocThreshold;
  std::size_t k = kMaxCandidates;

  SourceLists candidates(const Query& q) const {
    const CandidateVocabulary* v = vocab ? &*vocab : nullptr;
    const auto term = to_internal(q.term);
    SourceLists lists;
    lists[Source::IsA] = candidates_from_isa(isa, q, v, k);
    lists[Source::Cooc] = candidates_from_cooc(cooc, term, v, threshold, k);
    lists[Source::Hearst] = candidates_from_pairs(hearst, term, v, k, Source::Hearst);
    lists[Source::Phi] = candidates_from_phi(phi, embedding, term, v, k);
    return lists;
  }
};

inline std::vector<std::string> terms_of(const std::vector<ScoredCandidate>& list) {
  std::vector<std::string> out;
  for (const auto& c : list) out.push_back(c.term);
  return out;
}

inline void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log) {
  const std::string name(stage_name(stage));
  const auto out_path = artifact_path(config, stage);
  switch (stage) {
    case Stage::Normalize: {
      const auto stats = normalize_corpus(config.path("corpus"), out_path, detail::workers(config));
      log << name << ": " << stats.paragraphs_in << " paragraphs in, " << stats.paragraphs_out
          << " out, " << stats.phrases_appended << " phrases appended, " << stats.warnings.count
          << " malformed tokens skipped\n";
      break;
    }
    case Stage::ExtractHearst:
    case Stage::ExtractIsa: {
      const bool hearst = stage == Stage::ExtractHearst;
      const auto stats = extract_corpus(config.path("corpus"), hearst ? out_path : "",
                                        hearst ? "" : out_path, detail::workers(config));
      log << name << ": " << (hearst ? stats.hearst_matches : stats.isa_matches)
          << " matches in " << stats.paragraphs << " paragraphs\n";
      break;
    }
    case Stage::TrainEmbedding: {
      const auto econf = embedding_config(config);
      const auto normalized = require_artifact(config, Stage::Normalize);
      TrainStats stats;
      const auto model = train_cbow<float>(normalized, econf, &stats);
      save_embedding(out_path, model);
      save_frequencies(frequency_path(config), model);
      log << name << ": " << stats.vocab_size << " tokens, " << stats.train_words
          << " training words, dimension " << econf.dimension << "\n";
      break;
    }
    case Stage::CoocIndex: {
      const auto normalized = require_artifact(config, Stage::Normalize);
      const auto terms = detail::query_terms(config);
      const auto index = build_cooc_index(normalized, terms, detail::workers(config));
      save_cooc_index(out_path, index);
      log << name << ": " << index.entries().size() << " entries for " << terms.size()
          << " query terms\n";
      break;
    }
    case Stage::FitPhi: {
      const auto embedding_file = require_artifact(config, Stage::TrainEmbedding);
      if (!config.has("train-queries") || !config.has("train-gold")) {
        throw Error("fit-phi needs `train-queries` and `train-gold`");
      }
      const auto queries = load_queries(config.path("train-queries"));
      const auto gold = load_gold(config.path("train-gold"), queries);
      std::vector<TermPair> pairs;
      for (const auto& g : gold) {
        for (const auto& h : g.hypernyms) pairs.push_back({to_internal(g.query.term), to_internal(h)});
      }
      const auto model = load_embedding<float>(embedding_file);
      const auto fit = fit_phi(std::span<const TermPair>(pairs), model,
                               parse_phi_mode(config.get("phi-mode")), config.number<double>("ridge"));
      save_phi(out_path, fit.phi);
      log << name << ": " << to_string(fit.phi.mode) << " transform from " << fit.used_pairs
          << " pairs (" << fit.skipped_pairs << " skipped, not in embedding)\n";
      break;
    }
    case Stage::Predict: {
      EvidenceSet ev;
      ev.cooc = load_cooc_index(require_artifact(config, Stage::CoocIndex));
      ev.hearst = build_pair_index(require_artifact(config, Stage::ExtractHearst), PairKind::Hearst);
      ev.isa = build_pair_index(require_artifact(config, Stage::ExtractIsa), PairKind::IsA);
      ev.embedding = load_embedding<float>(require_artifact(config, Stage::TrainEmbedding),
                                           frequency_path(config));
      ev.phi = load_phi(require_artifact(config, Stage::FitPhi));
      if (config.flag("vocab-filter")) ev.vocab = load_vocabulary(config.path("vocabulary"));
      ev.threshold = config.number<std::uint64_t>("threshold");
      ev.k = config.number<std::size_t>("k");
      if (ev.k == 0 || ev.k > kMaxCandidates) throw Error("k must be between 1 and 15");

      ModuleOrder order;
      std::string order_note;
      const auto& mode = config.get("merge-order");
      if (mode == "trained") {
        const auto train_q = load_queries(config.path("train-queries"));
        const auto train_gold = load_gold(config.path("train-gold"), train_q);
        std::map<Source, std::vector<std::vector<std::string>>> per_source;
        for (const auto& q : train_q) {
          const auto lists = ev.candidates(q);
          for (Source s : kAllSources) per_source[s].push_back(terms_of(lists.at(s)));
        }
        std::map<Source, double> scores;
        order = choose_order(per_source, train_gold, &scores);
        for (const auto& [s, v] : scores) {
          order_note += "train-mrr\t" + std::string(to_string(s)) + "\t" + format_fixed3(v) + "\n";
        }
      } else if (mode != "default") {
        order = parse_module_order(mode);
      }

      const auto queries = load_queries(config.path("queries"));
      std::vector<RankedPrediction> merged;
      std::map<Source, std::vector<std::vector<std::string>>> per_source;
      for (const auto& q : queries) {
        const auto lists = ev.candidates(q);
        for (Source s : kAllSources) per_source[s].push_back(terms_of(lists.at(s)));
        merged.push_back(merge(q, lists, order, ev.k));
      }
      write_predictions(out_path, merged);
      for (Source s : kAllSources) {
        write_term_lists(detail::side_path(out_path, to_string(s)), per_source[s]);
      }
      {
        const auto order_path = config.out_dir() / "merge-order.txt";
        auto out = open_output(order_path);
        out << "order\t" << order.to_string() << '\n' << order_note;
        finish_output(out, order_path);
      }
      log << name << ": " << merged.size() << " queries, merge order " << order.to_string() << "\n";
      break;
    }
    case Stage::Evaluate: {
      const auto queries = load_queries(config.path("queries"));
      const auto gold = load_gold(config.path("gold"), queries);
      std::optional<QueryKind> kind;
      const auto& kf = config.get("kind-filter");
      if (kf == "concept") kind = QueryKind::Concept;
      else if (kf == "entity") kind = QueryKind::Entity;
      else if (kf != "all") throw Error("kind-filter must be all, concept or entity");
      const auto mode = parse_precision_mode(config.get("precision"));

      const bool external = config.has("predictions");
      const auto pred_path = external ? config.path("predictions") : require_artifact(config, Stage::Predict);
      auto score = [&](const std::filesystem::path& p) {
        const auto predictions = read_predictions(p);
        if (predictions.size() != queries.size()) {
          throw Error(p.string() + " has " + std::to_string(predictions.size()) +
                      " lines but there are " + std::to_string(queries.size()) + " queries");
        }
        return evaluate(predictions, gold, kind, mode);
      };
      std::vector<std::pair<std::string, MetricsReport>> columns;
      if (!external) {
        for (Source s : {Source::Cooc, Source::Hearst, Source::Phi, Source::IsA}) {
          const auto p = detail::side_path(pred_path, to_string(s));
          if (!std::filesystem::exists(p)) continue;
          auto r = score(p);
          write_metrics_report(detail::side_path(out_path, to_string(s)), r);
          columns.emplace_back(std::string(to_string(s)), r);
        }
      }
      const auto merged = score(pred_path);
      write_metrics_report(out_path, merged);
      columns.emplace_back("merged", merged);
      log << name << ": " << merged.n_queries << " queries\n" << format_report_table(columns);
      break;
    }
  }
  write_stamp(config, stage);
}

inline void run_pipeline(const PipelineConfig& config, std::ostream& log) {
  for (Stage s : kPipelineStages) run_stage(s, config, log);
}

// Runs a subcommand by name. Returns the process exit status; failures are
// reported on `err`.
inline int run(std::string_view subcommand, const PipelineConfig& config,
               std::ostream& log = std::cerr, std::ostream& err = std::cerr) {
  try {
    if (subcommand == "pipeline") {
      run_pipeline(config, log);
    } else if (auto stage = parse_stage(subcommand)) {
      run_stage(*stage, config, log);
    } else {
      throw Error("unknown subcommand '" + std::string(subcommand) + "'");
    }
    return 0;
  } catch (const std::exception& e) {
    err << "hyperdisc " << subcommand << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hyperdisc

#endif  // HYPERDISC_PIPELINE_HPP_
