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

#include "hyperdisc/embedding.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "checks.hpp"
#include "test_util.hpp"

namespace hyperdisc {
namespace {

using testing::DoubleModel;

TEST(CbowLoss, ZeroVectorsGiveLogTwoPerTerm) {
  DoubleModel model({"a", "b", "c", "d"}, 5);
  const std::vector<std::size_t> ctx = {1, 2};
  const std::vector<std::size_t> neg = {3, 2, 1};
  const auto step = cbow_step_loss(model, 0, ctx, neg);
  EXPECT_NEAR(step.loss, 4 * std::log(2.0), 1e-12);
  for (double g : step.grad_hidden) EXPECT_EQ(g, 0.0);
  for (const auto& r : step.output_grads) {
    for (double g : r.values) EXPECT_EQ(g, 0.0);
  }
}

TEST(CbowLoss, NegativeEqualToCenterAtZero) {
  DoubleModel model({"a", "b"}, 3);
  const std::vector<std::size_t> ctx = {1};
  const std::vector<std::size_t> neg = {0};
  EXPECT_GE(cbow_step_loss(model, 0, ctx, neg).loss, 2 * std::log(2.0) - 1e-12);
  // Center and negative share one output row; their gradients are summed.
  std::mt19937_64 rng(5);
  auto m = testing::random_model(rng, 2, 3, 0.5);
  const auto step = cbow_step_loss(m, 0, ctx, neg);
  ASSERT_EQ(step.output_grads.size(), 1u);
  EXPECT_EQ(step.output_grads[0].row, 0u);
}

TEST(CbowLoss, EmptyContextIsAnError) {
  DoubleModel model({"a"}, 2);
  const std::vector<std::size_t> none;
  EXPECT_THROW(cbow_step_loss(model, 0, none, none), Error);
}

TEST(CbowLoss, HiddenIsContextMean) {
  std::mt19937_64 rng(1);
  const auto model = testing::random_model(rng, 6, 4, 1.0);
  const std::vector<std::size_t> ctx = {1, 3, 3};
  const std::vector<std::size_t> neg = {2};
  const auto step = cbow_step_loss(model, 0, ctx, neg);
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_NEAR(step.hidden[d],
                (model.input(1)[d] + 2 * model.input(3)[d]) / 3.0, 1e-15);
  }
}

TEST(CbowLoss, GradientsMatchFiniteDifferences) {
  EXPECT_LT(testing::worst_gradient_error(2026, 100), 1e-4);
}

TEST(CbowLoss, GradientsVanishOutsideTouchedRows) {
  std::mt19937_64 rng(9);
  const auto model = testing::random_model(rng, 20, 8, 0.5);
  const testing::CbowExample ex{0, {1, 2}, {3}};
  const auto g = testing::analytic_gradient(model, ex);
  for (std::size_t row = 0; row < 40; ++row) {
    const bool touched = row == 1 || row == 2 || row == 20 || row == 23;
    if (touched) continue;
    for (std::size_t d = 0; d < 8; ++d) EXPECT_EQ(g[row * 8 + d], 0.0);
  }
}

// A small step along the negative gradient lowers the example's own loss.
TEST(CbowLoss, DescentProperty) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    auto model = testing::random_model(rng, 20, 8, 0.5);
    const auto ex = testing::random_example(rng, 20);
    const auto step = cbow_step_loss(model, ex.center, ex.context, ex.negatives);
    apply_step(model, step, 1e-3);
    EXPECT_LT(testing::example_loss(model, ex), step.loss);
  }
}

TEST(CbowUpdate, SameAsApplyingTheComputedStep) {
  std::mt19937_64 rng(31);
  std::vector<double> h, gh, coeff;
  for (int trial = 0; trial < 200; ++trial) {
    auto a = testing::random_model(rng, 20, 8, 0.5);
    auto b = a;
    const auto ex = testing::random_example(rng, 20);
    apply_step(a, cbow_step_loss(a, ex.center, ex.context, ex.negatives), 0.05);
    cbow_update(b, ex.center, ex.context, ex.negatives, 0.05, h, gh, coeff);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t d = 0; d < 8; ++d) {
        EXPECT_NEAR(a.input(i)[d], b.input(i)[d], 1e-14);
        EXPECT_NEAR(a.output(i)[d], b.output(i)[d], 1e-14);
      }
    }
  }
}

TEST(NegativeSampler, FollowsThreeQuarterPower) {
  const std::vector<std::uint64_t> freq = {1000, 100, 10, 1};
  NegativeSampler sampler(freq);
  Rng rng(3);
  std::vector<double> hits(freq.size(), 0);
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) ++hits[sampler.sample(rng)];
  double total = 0;
  for (auto f : freq) total += std::pow(double(f), 0.75);
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const double p = std::pow(double(freq[i]), 0.75) / total;
    const double sd = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(hits[i] / draws, p, 5 * sd) << i;
  }
}

class Training : public ::testing::Test {
 protected:
  // Correlated pair `a b` plus independent noise lines.
  void SetUp() override {
    std::mt19937 rng(12);
    std::string text;
    for (int i = 0; i < 1000; ++i) {
      text += "a b\n";
      std::string noise;
      for (int j = 0; j < 4; ++j) noise += "n" + std::to_string(rng() % 10) + " ";
      text += noise + "\n";
    }
    text += "rare rare rare rare\n";
    testing::write_file(dir / "corpus.txt", text);
  }

  EmbeddingConfig config() const {
    EmbeddingConfig c;
    c.dimension = 16;
    c.window = 3;
    c.min_count = 5;
    c.negatives = 3;
    c.epochs = 3;
    c.seed = 42;
    return c;
  }

  testing::TempDir dir;
};

TEST_F(Training, MinCountFiltersVocabulary) {
  TrainStats stats;
  const auto model = train_cbow(dir / "corpus.txt", config(), &stats);
  EXPECT_FALSE(model.index_of("rare"));
  EXPECT_TRUE(model.index_of("a"));
  EXPECT_EQ(stats.vocab_size, 12u);
  for (std::size_t i = 0; i < model.size(); ++i) EXPECT_GE(model.frequency(i), 5u);
  EXPECT_EQ(model.frequency(*model.index_of("a")), 1000u);
}

TEST_F(Training, VectorsHaveConfiguredDimension) {
  const auto model = train_cbow(dir / "corpus.txt", config());
  EXPECT_EQ(model.dimension(), 16u);
  for (std::size_t i = 0; i < model.size(); ++i) {
    EXPECT_EQ(model.input(i).size(), 16u);
    for (float x : model.input(i)) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST_F(Training, CorrelatedTokensEndUpClose) {
  const auto model = train_cbow(dir / "corpus.txt", config());
  auto cosine = [&](const std::string& x, const std::string& y) {
    auto u = model.input(*model.index_of(x));
    auto v = model.input(*model.index_of(y));
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t d = 0; d < u.size(); ++d) {
      uv += u[d] * v[d];
      uu += u[d] * u[d];
      vv += v[d] * v[d];
    }
    return uv / std::sqrt(uu * vv);
  };
  const double ab = cosine("a", "b");
  for (int n = 0; n < 10; ++n) EXPECT_GT(ab, cosine("a", "n" + std::to_string(n)));
}

TEST_F(Training, LearningRateDecaysToTenPercent) {
  TrainStats stats;
  train_cbow(dir / "corpus.txt", config(), &stats);
  EXPECT_GE(stats.final_learning_rate, 0.1 * 0.025);
  EXPECT_LT(stats.final_learning_rate, 0.1001 * 0.025);
}

TEST_F(Training, SingleWorkerIsDeterministic) {
  const auto a = train_cbow(dir / "corpus.txt", config());
  const auto b = train_cbow(dir / "corpus.txt", config());
  EXPECT_EQ(a, b);
  save_embedding(dir / "a.txt", a);
  save_embedding(dir / "b.txt", b);
  EXPECT_EQ(testing::read_file(dir / "a.txt"), testing::read_file(dir / "b.txt"));

  auto other = config();
  other.seed = 43;
  EXPECT_FALSE(train_cbow(dir / "corpus.txt", other) == a);
}

TEST_F(Training, EmptyVocabularyIsAnError) {
  auto c = config();
  c.min_count = 100000;
  EXPECT_THROW(train_cbow(dir / "corpus.txt", c), Error);
}

TEST_F(Training, InvalidConfigIsAnError) {
  auto c = config();
  c.dimension = 1;
  EXPECT_THROW(train_cbow(dir / "corpus.txt", c), Error);
  c = config();
  c.learning_rate = 0;
  EXPECT_THROW(train_cbow(dir / "corpus.txt", c), Error);
}

TEST_F(Training, SaveLoadRoundTrip) {
  const auto model = train_cbow(dir / "corpus.txt", config());
  save_embedding(dir / "e.txt", model);
  save_frequencies(dir / "e.freq", model);
  const auto back = load_embedding(dir / "e.txt", dir / "e.freq");
  ASSERT_EQ(back.vocab(), model.vocab());
  EXPECT_FALSE(back.has_output());
  for (std::size_t i = 0; i < model.size(); ++i) {
    EXPECT_EQ(back.frequency(i), model.frequency(i));
    for (std::size_t d = 0; d < model.dimension(); ++d) {
      EXPECT_EQ(back.input(i)[d], model.input(i)[d]);
    }
  }
  const auto header = testing::read_file(dir / "e.txt").substr(0, 5);
  EXPECT_EQ(header, "12 16");
}

TEST(LoadEmbedding, RejectsMalformedFiles) {
  testing::TempDir dir;
  testing::write_file(dir / "a.txt", "2 3\nx 1 2 3\n");
  EXPECT_THROW(load_embedding(dir / "a.txt"), Error);
  testing::write_file(dir / "b.txt", "1 3\nx 1 2\n");
  EXPECT_THROW(load_embedding(dir / "b.txt"), Error);
  testing::write_file(dir / "c.txt", "1 2\nx 1 nan\n");
  EXPECT_THROW(load_embedding(dir / "c.txt"), Error);
}

// ---- Phi --------------------------------------------------------------------

TEST(FitPhi, IdenticalPairsGiveZeroOffset) {
  DoubleModel model({"x", "y"}, 3);
  for (std::size_t d = 0; d < 3; ++d) model.input(0)[d] = model.input(1)[d] = 0.25 * d;
  const std::vector<TermPair> pairs = {{"x", "y"}, {"y", "x"}};
  const auto fit = fit_phi(std::span<const TermPair>(pairs), model, PhiMode::Offset);
  EXPECT_TRUE(fit.phi.offset.isZero(0));
}

TEST(FitPhi, ConstantOffsetRecoveredExactly) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 30, 5);
  Eigen::VectorXd d(5);
  d << 0.5, -1.0, 2.0, 0.0, 0.125;
  const auto pm = testing::pair_model(X, X.rowwise() + d.transpose());
  const auto fit = fit_phi(std::span<const TermPair>(pm.pairs), pm.model, PhiMode::Offset);
  EXPECT_LT((fit.phi.offset - d).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(fit.used_pairs, 30u);
}

TEST(FitPhi, OffsetIsTheMinimizer) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = testing::probe_offset(seed);
    EXPECT_LT(p.max_abs_vs_mean, 1e-9);
    EXPECT_LT(p.gradient_norm, 1e-8);
    EXPECT_EQ(p.worse_perturbations, p.perturbations);
  }
}

TEST(FitPhi, MatrixRecoversPlantedLinearMap) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = testing::probe_matrix(seed);
    EXPECT_LT(p.max_abs_vs_truth, 1e-6);
    EXPECT_LT(p.normal_eq_residual, 1e-8);
  }
}

TEST(FitPhi, MatrixWithRidgeSatisfiesNormalEquations) {
  const auto p = testing::probe_matrix(8, 40, 10, 0.5);
  EXPECT_LT(p.normal_eq_residual, 1e-8);
  EXPECT_GT(p.max_abs_vs_truth, 1e-6);  // shrinkage moves it off the planted map
}

TEST(FitPhi, OutOfVocabularyPairsAreSkipped) {
  DoubleModel model({"x", "y"}, 2);
  model.input(1)[0] = 1.0;
  const std::vector<TermPair> pairs = {{"x", "y"}, {"x", "zzz"}, {"qqq", "y"}};
  const auto fit = fit_phi(std::span<const TermPair>(pairs), model, PhiMode::Offset);
  EXPECT_EQ(fit.used_pairs, 1u);
  EXPECT_EQ(fit.skipped_pairs, 2u);
  EXPECT_DOUBLE_EQ(fit.phi.offset[0], 1.0);
}

TEST(FitPhi, NoUsablePairsIsAnError) {
  DoubleModel model({"x"}, 2);
  const std::vector<TermPair> pairs = {{"x", "nope"}};
  EXPECT_THROW(fit_phi(std::span<const TermPair>(pairs), model, PhiMode::Offset), Error);
  EXPECT_THROW(fit_phi(std::span<const TermPair>(), model, PhiMode::Matrix), Error);
}

TEST(FitPhi, SaveLoadRoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(6);
  PhiTransform offset{PhiMode::Offset, testing::random_matrix(rng, 7, 1).col(0), {}, 0};
  save_phi(dir / "o.txt", offset);
  const auto o = load_phi(dir / "o.txt");
  EXPECT_EQ(o.mode, PhiMode::Offset);
  EXPECT_EQ(o.offset, offset.offset);

  PhiTransform matrix{PhiMode::Matrix, {}, testing::random_matrix(rng, 4, 4), 0};
  save_phi(dir / "m.txt", matrix);
  const auto m = load_phi(dir / "m.txt");
  EXPECT_EQ(m.mode, PhiMode::Matrix);
  EXPECT_EQ(m.matrix, matrix.matrix);
  EXPECT_EQ(split(testing::read_file(dir / "m.txt"), '\n')[1], "4");
}

TEST(PhiCandidates, SelfExcluded) {
  DoubleModel model({"q"}, 2);
  PhiTransform phi{PhiMode::Offset, Eigen::VectorXd::Zero(2), {}, 0};
  EXPECT_TRUE(candidates_from_phi(phi, model, "q", nullptr).empty());
}

TEST(PhiCandidates, UnknownQueryGivesNothing) {
  DoubleModel model({"a", "b"}, 2);
  PhiTransform phi{PhiMode::Offset, Eigen::VectorXd::Zero(2), {}, 0};
  EXPECT_TRUE(candidates_from_phi(phi, model, "lemongrass", nullptr).empty());
}

TEST(PhiCandidates, PlantedClusterRanksHerbFirst) {
  DoubleModel model({"lemongrass", "herb", "car", "grass"}, 2);
  auto set = [&](const char* t, double x, double y) {
    model.input(*model.index_of(t))[0] = x;
    model.input(*model.index_of(t))[1] = y;
  };
  set("lemongrass", 0, 0);
  set("herb", 1.0, 1.1);
  set("grass", 0.5, 0.4);
  set("car", -3, 2);
  PhiTransform phi{PhiMode::Offset, Eigen::Vector2d(1, 1), {}, 0};
  const auto c = candidates_from_phi(phi, model, "lemongrass", nullptr);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].term, "herb");
  EXPECT_EQ(c[0].source, Source::Phi);
  EXPECT_NEAR(c[0].score, 1.0 / 1.1, 1e-12);
  EXPECT_EQ(c[1].term, "grass");
}

TEST(PhiCandidates, DimensionMismatchIsAnError) {
  DoubleModel model({"a", "b"}, 2);
  PhiTransform phi{PhiMode::Offset, Eigen::VectorXd::Zero(3), {}, 0};
  EXPECT_THROW(candidates_from_phi(phi, model, "a", nullptr), Error);
}

// Equals a full sort of all distances, on a 10,000-term vocabulary.
TEST(PhiCandidates, MatchesBruteForceScan) {
  std::mt19937_64 rng(10);
  const std::size_t n = 10000, dim = 12;
  const auto model = testing::random_model(rng, n, dim, 1.0);
  CandidateVocabulary vocab;
  for (std::size_t i = 0; i < n; i += 3) vocab.insert(model.token(i));
  for (int trial = 0; trial < 5; ++trial) {
    PhiTransform phi;
    if (trial % 2) {
      phi = {PhiMode::Matrix, {}, testing::random_matrix(rng, dim, dim) * 0.3, 0};
    } else {
      phi = {PhiMode::Offset, testing::random_matrix(rng, dim, 1).col(0) * 0.5, {}, 0};
    }
    const std::string q = model.token(rng() % n);
    for (const CandidateVocabulary* filter : {static_cast<const CandidateVocabulary*>(nullptr),
                                              static_cast<const CandidateVocabulary*>(&vocab)}) {
      const auto got = candidates_from_phi(phi, model, q, filter);
      const auto target = phi.apply(model.input(*model.index_of(q)));
      std::vector<std::pair<double, std::string>> all;
      for (std::size_t i = 0; i < n; ++i) {
        if (model.token(i) == q || (filter && !filter->contains(model.token(i)))) continue;
        double s = 0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = model.input(i)[d] - target[static_cast<Eigen::Index>(d)];
          s += diff * diff;
        }
        all.emplace_back(std::sqrt(s), model.token(i));
      }
      std::sort(all.begin(), all.end());
      ASSERT_EQ(got.size(), kMaxCandidates);
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].term, all[i].second);
        EXPECT_DOUBLE_EQ(got[i].score, 1.0 / (1.0 + all[i].first));
        if (i) {
          EXPECT_GE(got[i - 1].score, got[i].score);
        }
      }
    }
  }
}

}  // namespace
}  // namespace hyperdisc
