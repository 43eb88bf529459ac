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

#include "hyperdisc/pipeline.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "hyperdisc/synthetic.hpp"
#include "test_util.hpp"

namespace hyperdisc {
namespace {

namespace fs = std::filesystem;

TEST(Config, DefaultsMatchDocumentedValues) {
  const PipelineConfig c;
  EXPECT_EQ(c.number<int>("threshold"), 5);
  EXPECT_EQ(c.number<int>("k"), 15);
  EXPECT_EQ(c.number<int>("dim"), 300);
  EXPECT_EQ(c.number<int>("window"), 10);
  EXPECT_EQ(c.number<int>("min-count"), 5);
  EXPECT_EQ(c.get("phi-mode"), "offset");
  EXPECT_EQ(c.get("merge-order"), "default");
  EXPECT_EQ(c.get("precision"), "fixed");
  EXPECT_TRUE(c.flag("vocab-filter"));
  EXPECT_FALSE(c.has("seed"));
}

TEST(Config, ParsesFileAndResolvesRelativePaths) {
  testing::TempDir dir;
  testing::write_file(dir / "p.conf",
                      "# comment\n\n  corpus = data/c.txt \nthreshold=7\nvocabulary=/abs/v.txt\n");
  const auto c = PipelineConfig::from_file(dir / "p.conf");
  EXPECT_EQ(c.path("corpus"), (dir / "data/c.txt").lexically_normal());
  EXPECT_EQ(c.path("vocabulary"), fs::path("/abs/v.txt"));
  EXPECT_EQ(c.number<int>("threshold"), 7);
}

TEST(Config, RejectsUnknownKeysAndBadLines) {
  testing::TempDir dir;
  testing::write_file(dir / "a.conf", "colour=blue\n");
  EXPECT_THROW(PipelineConfig::from_file(dir / "a.conf"), Error);
  testing::write_file(dir / "b.conf", "threshold\n");
  EXPECT_THROW(PipelineConfig::from_file(dir / "b.conf"), Error);
  PipelineConfig c;
  EXPECT_THROW(c.set("colour", "blue"), Error);
  c.set("threshold", "many");
  EXPECT_THROW(c.number<int>("threshold"), Error);
  EXPECT_THROW(c.path("corpus"), Error);
}

TEST(Config, SeedIsRequiredForTraining) {
  PipelineConfig c;
  try {
    embedding_config(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("--seed"), std::string::npos);
  }
  c.set("seed", "9");
  c.set("dim", "40");
  const auto e = embedding_config(c);
  EXPECT_EQ(e.seed, 9u);
  EXPECT_EQ(e.dimension, 40u);
}

TEST(Stages, NamesRoundTrip) {
  for (Stage s : kPipelineStages) EXPECT_EQ(parse_stage(stage_name(s)), s);
  EXPECT_FALSE(parse_stage("train"));
  EXPECT_EQ(stage_name(Stage::CoocIndex), "cooc-index");
}

TEST(Stages, HashesFollowUpstreamConfiguration) {
  PipelineConfig a;
  a.set("seed", "1");
  PipelineConfig b = a;
  b.set("dim", "64");
  EXPECT_EQ(stage_hash(a, Stage::CoocIndex), stage_hash(b, Stage::CoocIndex));
  EXPECT_NE(stage_hash(a, Stage::TrainEmbedding), stage_hash(b, Stage::TrainEmbedding));
  EXPECT_NE(stage_hash(a, Stage::FitPhi), stage_hash(b, Stage::FitPhi));
  EXPECT_NE(stage_hash(a, Stage::Predict), stage_hash(b, Stage::Predict));
}

TEST(Synthetic, ShapeAndDeterminism) {
  const SyntheticSpec spec;
  const auto t = make_synthetic_taxonomy(spec);
  EXPECT_GE(t.corpus.size(), 5000u);
  EXPECT_EQ(t.hypernyms.size(), 10u);
  EXPECT_EQ(t.train.size() + t.test.size(), 500u);
  EXPECT_EQ(t.train.size(), t.test.size());
  const std::set<std::string> vocab(t.vocabulary.begin(), t.vocabulary.end());
  std::size_t entities = 0;
  for (const auto* split : {&t.train, &t.test}) {
    for (const auto& g : *split) {
      EXPECT_TRUE(vocab.count(g.hypernyms.at(0)));
      entities += g.query.kind == QueryKind::Entity;
    }
  }
  EXPECT_EQ(entities, 500u / 8);
  EXPECT_EQ(make_synthetic_taxonomy(spec).corpus, t.corpus);
  SyntheticSpec other = spec;
  other.seed = spec.seed + 1;
  EXPECT_NE(make_synthetic_taxonomy(other).hypernyms, t.hypernyms);
}

// The planted IS-A sentences come back out of the extractor.
TEST(Synthetic, PlantedIsAPairsAreExtractable) {
  SyntheticSpec spec;
  spec.categories = 3;
  spec.hyponyms_per_category = 40;
  spec.min_paragraphs = 0;
  const auto t = make_synthetic_taxonomy(spec);
  std::set<std::pair<std::string, std::string>> found;
  for (const auto& p : t.corpus) {
    for (const auto& m : extract_isa(p)) found.emplace(m.hyponyms[0], m.hypernym);
  }
  std::size_t covered = 0, total = 0;
  for (std::size_t c = 0; c < t.hypernyms.size(); ++c) {
    for (const auto& h : t.hyponyms[c]) {
      ++total;
      covered += found.count({h, t.hypernyms[c]});
    }
  }
  EXPECT_EQ(covered, total - 3 * 4);  // two of every twenty carry no IS-A sentence
}

// A small planted benchmark shared by the end-to-end tests.
class SyntheticPipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticSpec spec;
    spec.categories = 6;
    spec.hyponyms_per_category = 30;
    spec.min_paragraphs = 2500;
    conf_path = write_synthetic_benchmark(make_synthetic_taxonomy(spec), dir.path(), 11);
  }

  PipelineConfig config(const std::string& out) const {
    auto c = PipelineConfig::from_file(conf_path);
    c.set("out-dir", (dir / out).string());
    return c;
  }

  int run_quiet(std::string_view sub, const PipelineConfig& c, std::string* err = nullptr) {
    std::ostringstream log, errs;
    const int rc = run(sub, c, log, errs);
    if (err) *err = errs.str();
    return rc;
  }

  testing::TempDir dir;
  fs::path conf_path;
};

TEST_F(SyntheticPipeline, PredictWithoutIndexNamesTheMissingStage) {
  const auto c = config("out");
  std::string err;
  EXPECT_EQ(run_quiet("predict", c, &err), 1);
  EXPECT_NE(err.find("`cooc-index`"), std::string::npos) << err;
  EXPECT_NE(err.find("hyperdisc predict: error"), std::string::npos) << err;
}

TEST_F(SyntheticPipeline, TrainingWithoutSeedFails) {
  auto c = config("out");
  c.set("seed", "");
  ASSERT_EQ(run_quiet("normalize", c), 0);
  std::string err;
  EXPECT_EQ(run_quiet("train-embedding", c, &err), 1);
  EXPECT_NE(err.find("--seed is required"), std::string::npos) << err;
}

TEST_F(SyntheticPipeline, ChangedUpstreamConfigurationIsStale) {
  auto c = config("out");
  for (auto s : {"normalize", "train-embedding"}) ASSERT_EQ(run_quiet(s, c), 0);
  c.set("dim", "24");
  std::string err;
  EXPECT_EQ(run_quiet("fit-phi", c, &err), 1);
  EXPECT_NE(err.find("stale artifact"), std::string::npos) << err;
  EXPECT_NE(err.find("`train-embedding`"), std::string::npos) << err;
}

TEST_F(SyntheticPipeline, StagesEqualPipelineAndRunsAreDeterministic) {
  const auto a = config("a");
  const auto b = config("b");
  const auto c = config("c");
  ASSERT_EQ(run_quiet("pipeline", a), 0);
  ASSERT_EQ(run_quiet("pipeline", b), 0);
  for (Stage s : kPipelineStages) ASSERT_EQ(run_quiet(stage_name(s), c), 0) << stage_name(s);

  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(dir / "b" / name)) << name;
    if (name.extension() != ".stamp") {
      EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(dir / "c" / name)) << name;
    }
  }
  for (auto f : {"predictions.txt", "metrics.tsv", "cooc.idx", "embedding.txt", "phi.txt",
                 "merge-order.txt", "predictions.isa.txt", "metrics.cooc.tsv"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  }
}

TEST_F(SyntheticPipeline, RecoversPlantedTaxonomy) {
  const auto c = config("out");
  ASSERT_EQ(run_quiet("pipeline", c), 0);
  const auto merged = read_metrics_report(dir / "out" / "metrics.tsv");
  const auto isa = read_metrics_report(dir / "out" / "metrics.isa.tsv");
  const auto hearst = read_metrics_report(dir / "out" / "metrics.hearst.tsv");
  const auto phi = read_metrics_report(dir / "out" / "metrics.phi.tsv");
  EXPECT_GE(merged.at("MRR"), 0.5);
  EXPECT_GE(isa.at("P@1"), 0.8);
  EXPECT_GT(isa.at("MRR"), hearst.at("MRR"));
  EXPECT_GT(isa.at("MRR"), phi.at("MRR"));

  const auto preds = read_predictions(dir / "out" / "predictions.txt");
  for (const auto& p : preds) EXPECT_LE(p.size(), kMaxCandidates);
}

TEST_F(SyntheticPipeline, TrainedMergeOrderIsRecorded) {
  auto c = config("out");
  c.set("merge-order", "trained");
  ASSERT_EQ(run_quiet("pipeline", c), 0);
  const auto note = testing::read_file(dir / "out" / "merge-order.txt");
  EXPECT_EQ(note.rfind("order\t", 0), 0u);
  EXPECT_NE(note.find("train-mrr\tisa\t"), std::string::npos);
}

TEST_F(SyntheticPipeline, ExplicitMergeOrderAndExternalPredictions) {
  auto c = config("out");
  c.set("merge-order", "phi,hearst,cooc,isa");
  ASSERT_EQ(run_quiet("pipeline", c), 0);
  EXPECT_EQ(split(testing::read_file(dir / "out" / "merge-order.txt"), '\n')[0],
            "order\tphi,hearst,cooc,isa");

  // Scoring a bare predictions file skips the per-source reports.
  auto e = config("ext");
  e.set("predictions", (dir / "out" / "predictions.isa.txt").string());
  ASSERT_EQ(run_quiet("evaluate", e), 0);
  EXPECT_EQ(testing::read_file(dir / "ext" / "metrics.tsv"),
            testing::read_file(dir / "out" / "metrics.isa.tsv"));
  EXPECT_FALSE(fs::exists(dir / "ext" / "metrics.isa.tsv"));
}

TEST_F(SyntheticPipeline, UnknownSubcommandFails) {
  std::string err;
  EXPECT_EQ(run_quiet("bake", config("out"), &err), 1);
  EXPECT_NE(err.find("unknown subcommand"), std::string::npos);
}

}  // namespace
}  // namespace hyperdisc
