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

#ifndef HYPERDISC_SYNTHETIC_HPP_
#define HYPERDISC_SYNTHETIC_HPP_

// Generator for a planted-taxonomy benchmark: a POS-tagged corpus in which
// each of `categories` invented hypernyms has `hyponyms_per_category`
// invented hyponyms. Evidence is planted the way it shows up in web text:
//
//   * IS-A sentences ("a X is a Y") for 90% of hyponyms, twice each; every
//     third hyponym also gets one sentence naming a generic noun instead.
//   * Hearst sentences: each hyponym sits in one list headed by its true
//     hypernym (rotating through all six patterns) and in two lists headed
//     by a generic noun ("things such as ...", "... and other items").
//   * Co-occurrence paragraphs mentioning hyponym and hypernym together with
//     filler words.
//   * Filler-only paragraphs up to `min_paragraphs`.
//
// Even-indexed hyponyms form the training split, odd-indexed the test split.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "hyperdisc/corpus_io.hpp"
#include "hyperdisc/embedding.hpp"

namespace hyperdisc {

struct SyntheticSpec {
  std::size_t categories = 10;
  std::size_t hyponyms_per_category = 50;
  std::size_t min_paragraphs = 5000;
  std::size_t cooc_paragraphs_per_hyponym = 7;
  std::uint64_t seed = 7;
};

struct SyntheticTaxonomy {
  std::vector<std::string> hypernyms;
  std::vector<std::vector<std::string>> hyponyms;  // [category][j]
  std::vector<TaggedParagraph> corpus;
  std::vector<std::string> vocabulary;
  std::vector<GoldSet> train;
  std::vector<GoldSet> test;
};

namespace detail {

inline const std::vector<std::string>& generic_nouns() {
  static const std::vector<std::string> v = {"thing", "item", "example"};
  return v;
}

struct FillerWord {
  const char* word;
  const char* tag;
};

inline const std::vector<FillerWord>& fillers() {
  static const std::vector<FillerWord> v = {
      {"people", "NNS"}, {"time", "NN"},     {"way", "NN"},       {"area", "NN"},
      {"group", "NN"},   {"place", "NN"},    {"system", "NN"},    {"part", "NN"},
      {"number", "NN"},  {"world", "NN"},    {"market", "NN"},    {"garden", "NN"},
      {"report", "NN"},  {"season", "NN"},   {"village", "NN"},   {"family", "NN"},
      {"see", "VB"},     {"use", "VB"},      {"find", "VBP"},     {"grow", "VBP"},
      {"sell", "VBP"},   {"describe", "VBP"}, {"mention", "VBD"}, {"discuss", "VBD"},
      {"good", "JJ"},    {"new", "JJ"},      {"large", "JJ"},     {"local", "JJ"},
      {"common", "JJ"},  {"rare", "JJ"},     {"often", "RB"},     {"usually", "RB"},
      {"also", "RB"},    {"rarely", "RB"},
  };
  return v;
}

inline std::string invent_word(Rng& rng, std::size_t syllables) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += consonants[rng.below(consonants.size())];
    w += vowels[rng.below(vowels.size())];
  }
  return w;
}

class ParagraphBuilder {
 public:
  ParagraphBuilder& add(std::string surface, std::string pos) {
    p_.tokens.push_back({std::move(surface), std::move(pos)});
    return *this;
  }
  ParagraphBuilder& filler(Rng& rng, std::size_t n) {
    const auto& f = fillers();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& w = f[rng.below(f.size())];
      add(w.word, w.tag);
    }
    return *this;
  }
  // "We saw" style lead-in that never forms a noun phrase with what follows.
  ParagraphBuilder& lead(Rng& rng) {
    static const std::vector<std::pair<const char*, const char*>> verbs = {
        {"saw", "VBD"}, {"found", "VBD"}, {"like", "VBP"}, {"mentioned", "VBD"}};
    const auto& v = verbs[rng.below(verbs.size())];
    return add("We", "PRP").add(v.first, v.second);
  }
  ParagraphBuilder& list(const std::vector<std::string>& items, std::string_view conj) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0 && i + 1 < items.size()) add(",", ",");
      if (i > 0 && i + 1 == items.size()) add(std::string(conj), "CC");
      add(items[i], "NN");
    }
    return *this;
  }
  TaggedParagraph done() {
    add(".", ".");
    return std::move(p_);
  }

 private:
  TaggedParagraph p_;
};

// Hearst sentence for one of the six patterns (0..5).
inline TaggedParagraph hearst_sentence(Rng& rng, std::size_t pattern, const std::string& hyper,
                                       const std::vector<std::string>& hypos) {
  ParagraphBuilder b;
  switch (pattern % 6) {
    case 0:
      b.lead(rng).add("the", "DT").add(hyper, "NNS").add("such", "JJ").add("as", "IN").list(hypos, "and");
      break;
    case 1:
      b.lead(rng).add("such", "JJ").add(hyper, "NNS").add("as", "IN").list(hypos, "or");
      break;
    case 2:
      b.lead(rng).add("the", "DT").add(hyper, "NNS").add(",", ",").add("including", "VBG").list(hypos, "and");
      break;
    case 3:
      b.lead(rng).add(hyper, "NNS").add(",", ",").add("especially", "RB").list(hypos, "and");
      break;
    case 4: {
      b.lead(rng);
      std::vector<std::string> head(hypos);
      for (std::size_t i = 0; i < head.size(); ++i) {
        if (i > 0) b.add(",", ",");
        b.add(head[i], "NN");
      }
      b.add("or", "CC").add("other", "JJ").add(hyper, "NNS");
      break;
    }
    default: {
      b.lead(rng);
      for (std::size_t i = 0; i < hypos.size(); ++i) {
        if (i > 0) b.add(",", ",");
        b.add(hypos[i], "NN");
      }
      b.add("and", "CC").add("other", "JJ").add(hyper, "NNS");
      break;
    }
  }
  return b.done();
}

}  // namespace detail

inline SyntheticTaxonomy make_synthetic_taxonomy(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  SyntheticTaxonomy t;
  std::set<std::string> used;
  auto fresh = [&](std::size_t syllables) {
    for (;;) {
      auto w = detail::invent_word(rng, syllables);
      if (used.insert(w).second) return w;
    }
  };
  for (std::size_t c = 0; c < spec.categories; ++c) {
    t.hypernyms.push_back(fresh(2));
    t.hyponyms.emplace_back();
    for (std::size_t j = 0; j < spec.hyponyms_per_category; ++j) t.hyponyms[c].push_back(fresh(3));
  }
  const auto& generic = detail::generic_nouns();

  // IS-A evidence.
  for (std::size_t c = 0; c < spec.categories; ++c) {
    for (std::size_t j = 0; j < spec.hyponyms_per_category; ++j) {
      const auto& h = t.hyponyms[c][j];
      auto isa = [&](const std::string& hyper) {
        detail::ParagraphBuilder b;
        b.filler(rng, 2).add(".", ".").add("A", "DT").add(h, "NN").add("is", "VBZ").add("a", "DT");
        t.corpus.push_back(b.add(hyper, "NN").done());
      };
      if (j % 20 != 0 && j % 20 != 11) {
        isa(t.hypernyms[c]);
        isa(t.hypernyms[c]);
      }
      if (j % 3 == 0) isa(generic[(c + j) % generic.size()]);
    }
  }

  // Hearst evidence: true lists within a category, generic lists across.
  std::size_t pattern = 0;
  for (std::size_t c = 0; c < spec.categories; ++c) {
    const auto& hs = t.hyponyms[c];
    for (std::size_t j = 0; j < hs.size(); j += 3) {
      std::vector<std::string> items(hs.begin() + static_cast<std::ptrdiff_t>(j),
                                     hs.begin() + static_cast<std::ptrdiff_t>(std::min(hs.size(), j + 3)));
      t.corpus.push_back(detail::hearst_sentence(rng, pattern++, t.hypernyms[c], items));
    }
  }
  std::vector<std::string> all;
  std::vector<std::size_t> generic_of;
  for (std::size_t c = 0; c < spec.categories; ++c) {
    for (std::size_t j = 0; j < t.hyponyms[c].size(); ++j) {
      all.push_back(t.hyponyms[c][j]);
      generic_of.push_back((c + j) % generic.size());
    }
  }
  for (std::size_t g = 0; g < generic.size(); ++g) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (generic_of[i] == g) members.push_back(all[i]);
    }
    for (std::size_t round = 0; round < 2; ++round) {
      for (std::size_t i = members.size(); i > 1; --i) {
        std::swap(members[i - 1], members[rng.below(i)]);
      }
      for (std::size_t j = 0; j < members.size(); j += 3) {
        std::vector<std::string> items(
            members.begin() + static_cast<std::ptrdiff_t>(j),
            members.begin() + static_cast<std::ptrdiff_t>(std::min(members.size(), j + 3)));
        t.corpus.push_back(detail::hearst_sentence(rng, pattern++, generic[g], items));
      }
    }
  }

  // Paragraph co-occurrence.
  for (std::size_t c = 0; c < spec.categories; ++c) {
    for (const auto& h : t.hyponyms[c]) {
      for (std::size_t r = 0; r < spec.cooc_paragraphs_per_hyponym; ++r) {
        detail::ParagraphBuilder b;
        b.filler(rng, 2 + rng.below(3)).add("the", "DT").add(h, "NN").filler(rng, 1 + rng.below(3));
        b.add("the", "DT").add(t.hypernyms[c], "NN").filler(rng, 1 + rng.below(3));
        t.corpus.push_back(b.done());
      }
    }
  }
  while (t.corpus.size() < spec.min_paragraphs) {
    detail::ParagraphBuilder b;
    t.corpus.push_back(b.filler(rng, 4 + rng.below(6)).done());
  }
  for (std::size_t i = t.corpus.size(); i > 1; --i) {
    std::swap(t.corpus[i - 1], t.corpus[rng.below(i)]);
  }

  std::set<std::string> vocab(t.hypernyms.begin(), t.hypernyms.end());
  vocab.insert(generic.begin(), generic.end());
  vocab.insert(all.begin(), all.end());
  for (const auto& f : detail::fillers()) {
    if (std::string_view(f.tag).starts_with("NN")) vocab.insert(f.word);
  }
  t.vocabulary.assign(vocab.begin(), vocab.end());

  std::size_t n = 0;
  for (std::size_t c = 0; c < spec.categories; ++c) {
    for (std::size_t j = 0; j < t.hyponyms[c].size(); ++j, ++n) {
      GoldSet g{{t.hyponyms[c][j], n % 8 == 7 ? QueryKind::Entity : QueryKind::Concept},
                {t.hypernyms[c]}};
      (j % 2 == 0 ? t.train : t.test).push_back(std::move(g));
    }
  }
  return t;
}

// Writes corpus, vocabulary, query/gold splits and a pipeline.conf into
// `dir`. Returns the path of the configuration file.
inline std::filesystem::path write_synthetic_benchmark(const SyntheticTaxonomy& t,
                                                       const std::filesystem::path& dir,
                                                       std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  write_tagged_corpus(dir / "corpus.pos.txt", t.corpus);
  {
    auto out = open_output(dir / "vocabulary.txt");
    for (const auto& v : t.vocabulary) out << v << '\n';
    finish_output(out, dir / "vocabulary.txt");
  }
  auto write_split = [&](const std::vector<GoldSet>& split, const std::string& name) {
    std::vector<Query> qs;
    std::vector<std::vector<std::string>> gold;
    for (const auto& g : split) {
      qs.push_back(g.query);
      gold.push_back(g.hypernyms);
    }
    write_queries(dir / (name + ".queries.txt"), qs);
    write_term_lists(dir / (name + ".gold.txt"), gold);
  };
  write_split(t.train, "train");
  write_split(t.test, "test");
  const auto conf = dir / "pipeline.conf";
  auto out = open_output(conf);
  out << "# planted-taxonomy benchmark\n"
      << "corpus=corpus.pos.txt\nvocabulary=vocabulary.txt\n"
      << "queries=test.queries.txt\ngold=test.gold.txt\n"
      << "train-queries=train.queries.txt\ntrain-gold=train.gold.txt\n"
      << "out-dir=out\n"
      << "dim=50\nwindow=5\nmin-count=5\nnegatives=5\nepochs=5\nlr=0.025\n"
      << "seed=" << seed << "\nphi-mode=offset\nmerge-order=default\nworkers=1\n";
  finish_output(out, conf);
  return conf;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_SYNTHETIC_HPP_
