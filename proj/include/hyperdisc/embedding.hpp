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

#ifndef HYPERDISC_EMBEDDING_HPP_
#define HYPERDISC_EMBEDDING_HPP_

// CBOW word embeddings with negative sampling, trained on the normalized
// corpus, plus the hyponym -> hypernym projection (Phi) fitted on training
// pairs and used to retrieve candidates by Euclidean distance.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyperdisc/corpus_io.hpp"

namespace hyperdisc {

struct EmbeddingConfig {
  std::size_t dimension = 300;
  std::size_t window = 10;
  std::uint64_t min_count = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
  // workers > 1 trains lock-free across threads and is not reproducible.
  std::size_t workers = 1;

  void validate() const {
    if (dimension < 2) throw Error("embedding dimension must be at least 2");
    if (window == 0 || min_count == 0 || negatives == 0 || epochs == 0 || workers == 0) {
      throw Error("window, min-count, negatives, epochs and workers must be positive");
    }
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  }
};

// Deterministic generator with platform-independent derived draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

template <std::floating_point Real>
class BasicEmbeddingModel {
 public:
  BasicEmbeddingModel() = default;

  BasicEmbeddingModel(std::vector<std::string> vocab, std::size_t dimension,
                      std::vector<std::uint64_t> frequencies = {}, bool with_output = true)
      : vocab_(std::move(vocab)), dim_(dimension), freq_(std::move(frequencies)) {
    if (freq_.empty()) freq_.assign(vocab_.size(), 0);
    if (freq_.size() != vocab_.size()) throw Error("frequency table size mismatch");
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (!index_.emplace(vocab_[i], i).second) {
        throw Error("duplicate embedding token '" + vocab_[i] + "'");
      }
    }
    input_.assign(vocab_.size() * dim_, Real(0));
    if (with_output) output_.assign(vocab_.size() * dim_, Real(0));
  }

  std::size_t size() const { return vocab_.size(); }
  std::size_t dimension() const { return dim_; }
  bool has_output() const { return !output_.empty(); }

  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(std::size_t i) const { return vocab_[i]; }
  std::uint64_t frequency(std::size_t i) const { return freq_[i]; }

  std::optional<std::size_t> index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<Real> input(std::size_t i) { return {input_.data() + i * dim_, dim_}; }
  std::span<const Real> input(std::size_t i) const { return {input_.data() + i * dim_, dim_}; }
  std::span<Real> output(std::size_t i) { return {output_.data() + i * dim_, dim_}; }
  std::span<const Real> output(std::size_t i) const {
    return {output_.data() + i * dim_, dim_};
  }

  friend bool operator==(const BasicEmbeddingModel&, const BasicEmbeddingModel&) = default;

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> freq_;
  std::vector<Real> input_;
  std::vector<Real> output_;
};

using EmbeddingModel = BasicEmbeddingModel<float>;

// ---------------------------------------------------------------------------
// Loss and gradients of a single CBOW example.

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)), stable for large |x|.
inline double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

struct SparseGradient {
  std::size_t row = 0;
  std::vector<double> values;
};

struct CbowStep {
  double loss = 0.0;
  std::vector<double> hidden;       // h, mean of the context input vectors
  std::vector<double> grad_hidden;  // dL/dh
  std::vector<SparseGradient> input_grads;   // per distinct context row
  std::vector<SparseGradient> output_grads;  // per distinct center/negative row
};

namespace detail {

inline void accumulate_row(std::vector<SparseGradient>& grads, std::size_t row,
                           std::span<const double> g, double scale) {
  auto it = std::find_if(grads.begin(), grads.end(),
                         [&](const SparseGradient& s) { return s.row == row; });
  if (it == grads.end()) {
    grads.push_back({row, std::vector<double>(g.size(), 0.0)});
    it = std::prev(grads.end());
  }
  for (std::size_t d = 0; d < g.size(); ++d) it->values[d] += scale * g[d];
}

template <typename Real>
double dot(std::span<const Real> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += static_cast<double>(a[d]) * b[d];
  return s;
}

}  // namespace detail

// L = -log s(u_c.h) - sum_n log s(-u_n.h), h = mean of context input vectors.
// Gradients are with respect to the model's input and output rows; repeated
// rows are summed.
template <std::floating_point Real>
CbowStep cbow_step_loss(const BasicEmbeddingModel<Real>& model, std::size_t center,
                        std::span<const std::size_t> context,
                        std::span<const std::size_t> negatives) {
  if (context.empty()) throw Error("CBOW context must not be empty");
  if (!model.has_output()) throw Error("model has no output vectors");
  const std::size_t dim = model.dimension();
  CbowStep step;
  step.hidden.assign(dim, 0.0);
  for (std::size_t c : context) {
    auto v = model.input(c);
    for (std::size_t d = 0; d < dim; ++d) step.hidden[d] += v[d];
  }
  for (double& x : step.hidden) x /= static_cast<double>(context.size());

  step.grad_hidden.assign(dim, 0.0);
  auto term = [&](std::size_t row, double label) {
    auto u = model.output(row);
    const double score = detail::dot<Real>(u, step.hidden);
    // label 1: -log s(score); label 0: -log s(-score)
    step.loss -= label > 0 ? log_sigmoid(score) : log_sigmoid(-score);
    const double g = sigmoid(score) - label;  // dL/dscore
    for (std::size_t d = 0; d < dim; ++d) step.grad_hidden[d] += g * u[d];
    detail::accumulate_row(step.output_grads, row, step.hidden, g);
  };
  term(center, 1.0);
  for (std::size_t n : negatives) term(n, 0.0);

  const double share = 1.0 / static_cast<double>(context.size());
  for (std::size_t c : context) {
    detail::accumulate_row(step.input_grads, c, step.grad_hidden, share);
  }
  return step;
}

// Applies `-rate * gradient` from a computed step.
template <std::floating_point Real>
void apply_step(BasicEmbeddingModel<Real>& model, const CbowStep& step, double rate) {
  for (const auto& g : step.input_grads) {
    auto v = model.input(g.row);
    for (std::size_t d = 0; d < v.size(); ++d) v[d] -= static_cast<Real>(rate * g.values[d]);
  }
  for (const auto& g : step.output_grads) {
    auto u = model.output(g.row);
    for (std::size_t d = 0; d < u.size(); ++d) u[d] -= static_cast<Real>(rate * g.values[d]);
  }
}

// Allocation-free SGD update used by training. Every score is computed from
// pre-update parameters, so this is exactly apply_step(cbow_step_loss(...)).
template <std::floating_point Real>
void cbow_update(BasicEmbeddingModel<Real>& model, std::size_t center,
                 std::span<const std::size_t> context, std::span<const std::size_t> negatives,
                 double rate, std::vector<double>& hidden, std::vector<double>& grad_hidden,
                 std::vector<double>& coeff) {
  const std::size_t dim = model.dimension();
  hidden.assign(dim, 0.0);
  grad_hidden.assign(dim, 0.0);
  for (std::size_t c : context) {
    auto v = model.input(c);
    for (std::size_t d = 0; d < dim; ++d) hidden[d] += v[d];
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (double& x : hidden) x *= inv;

  const std::size_t m = negatives.size() + 1;
  coeff.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t row = j == 0 ? center : negatives[j - 1];
    const double label = j == 0 ? 1.0 : 0.0;
    auto u = model.output(row);
    coeff[j] = sigmoid(detail::dot<Real>(std::span<const Real>(u), hidden)) - label;
    for (std::size_t d = 0; d < dim; ++d) grad_hidden[d] += coeff[j] * u[d];
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t row = j == 0 ? center : negatives[j - 1];
    auto u = model.output(row);
    for (std::size_t d = 0; d < dim; ++d) u[d] -= static_cast<Real>(rate * coeff[j] * hidden[d]);
  }
  for (std::size_t c : context) {
    auto v = model.input(c);
    for (std::size_t d = 0; d < dim; ++d) v[d] -= static_cast<Real>(rate * inv * grad_hidden[d]);
  }
}

// ---------------------------------------------------------------------------
// Training.

struct TokenCount {
  std::string token;
  std::uint64_t count = 0;
};

// Tokens with frequency >= min_count, most frequent first, ties by token.
inline std::vector<TokenCount> count_tokens(const std::filesystem::path& corpus,
                                            std::uint64_t min_count) {
  auto in = open_input(corpus);
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  while (std::getline(in, line)) {
    for (auto t : split_ws(line)) ++counts[std::string(t)];
  }
  std::vector<TokenCount> out;
  for (auto& [t, n] : counts) {
    if (n >= min_count) out.push_back({t, n});
  }
  std::sort(out.begin(), out.end(), [](const TokenCount& a, const TokenCount& b) {
    return a.count != b.count ? a.count > b.count : a.token < b.token;
  });
  return out;
}

// Draws negatives from the unigram distribution raised to 3/4.
class NegativeSampler {
 public:
  explicit NegativeSampler(std::span<const std::uint64_t> frequencies) {
    cumulative_.reserve(frequencies.size());
    double total = 0.0;
    for (auto f : frequencies) {
      total += std::pow(static_cast<double>(f), 0.75);
      cumulative_.push_back(total);
    }
  }

  std::size_t sample(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

struct TrainStats {
  std::size_t vocab_size = 0;
  std::uint64_t train_words = 0;
  double final_learning_rate = 0.0;
};

template <std::floating_point Real = float>
BasicEmbeddingModel<Real> train_cbow(const std::filesystem::path& corpus,
                                     const EmbeddingConfig& config,
                                     TrainStats* stats = nullptr) {
  config.validate();
  const auto counts = count_tokens(corpus, config.min_count);
  if (counts.empty()) {
    throw Error("no token of " + corpus.string() + " reaches min-count " +
                std::to_string(config.min_count));
  }
  std::vector<std::string> vocab;
  std::vector<std::uint64_t> freq;
  for (const auto& c : counts) {
    vocab.push_back(c.token);
    freq.push_back(c.count);
  }
  BasicEmbeddingModel<Real> model(std::move(vocab), config.dimension, freq);

  Rng init(config.seed);
  const double scale = 1.0 / static_cast<double>(config.dimension);
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (auto& x : model.input(i)) x = static_cast<Real>((init.uniform() - 0.5) * scale);
  }

  // In-vocabulary token ids per paragraph; contexts never cross lines.
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> offsets{0};
  {
    auto in = open_input(corpus);
    std::string line;
    while (std::getline(in, line)) {
      for (auto t : split_ws(line)) {
        if (auto i = model.index_of(std::string(t))) ids.push_back(static_cast<std::uint32_t>(*i));
      }
      if (ids.size() > offsets.back()) offsets.push_back(ids.size());
    }
  }
  const std::size_t paragraphs = offsets.size() - 1;
  const double total_steps = static_cast<double>(ids.size()) * static_cast<double>(config.epochs);
  const NegativeSampler sampler(freq);

  std::vector<double> final_rate(config.workers, config.learning_rate);
  auto worker = [&](std::size_t w, std::size_t p_begin, std::size_t p_end) {
    Rng rng(config.seed + 0x9e3779b97f4a7c15ULL * (w + 1));
    std::vector<std::size_t> context;
    std::vector<std::size_t> negatives;
    std::vector<double> hidden, grad_hidden, coeff;
    const std::size_t words = offsets[p_end] - offsets[p_begin];
    // Each worker owns a share of the schedule in proportion to its words.
    const double share = ids.empty() ? 1.0 : static_cast<double>(words) / ids.size();
    const double my_total = std::max(1.0, total_steps * share);
    double done = 0.0;
    double rate = config.learning_rate;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t p = p_begin; p < p_end; ++p) {
        const std::size_t begin = offsets[p];
        const std::size_t end = offsets[p + 1];
        for (std::size_t pos = begin; pos < end; ++pos, done += 1.0) {
          rate = config.learning_rate * (1.0 - 0.9 * std::min(1.0, done / my_total));
          context.clear();
          const std::size_t lo = pos - std::min(config.window, pos - begin);
          const std::size_t hi = std::min(end, pos + config.window + 1);
          for (std::size_t c = lo; c < hi; ++c) {
            if (c != pos) context.push_back(ids[c]);
          }
          if (context.empty()) continue;
          const std::size_t center = ids[pos];
          negatives.clear();
          for (std::size_t k = 0; k < config.negatives; ++k) {
            const std::size_t n = sampler.sample(rng);
            if (n != center) negatives.push_back(n);
          }
          cbow_update(model, center, context, negatives, rate, hidden, grad_hidden, coeff);
        }
      }
    }
    final_rate[w] = rate;
  };

  if (config.workers == 1) {
    worker(0, 0, paragraphs);
  } else {
    std::vector<std::thread> threads;
    const std::size_t per = (paragraphs + config.workers - 1) / config.workers;
    for (std::size_t w = 0; w < config.workers; ++w) {
      const std::size_t b = std::min(paragraphs, w * per);
      const std::size_t e = std::min(paragraphs, b + per);
      threads.emplace_back(worker, w, b, e);
    }
    for (auto& t : threads) t.join();
  }

  if (stats) {
    stats->vocab_size = model.size();
    stats->train_words = ids.size();
    stats->final_learning_rate = final_rate[0];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Persistence: `|vocab| dimension` header, then `token v1 ... vd` per line.
// Frequencies go to a companion file of `token count` lines.

template <std::floating_point Real>
void save_embedding(const std::filesystem::path& path, const BasicEmbeddingModel<Real>& model) {
  auto out = open_output(path);
  out << model.size() << ' ' << model.dimension() << '\n';
  std::string line;
  for (std::size_t i = 0; i < model.size(); ++i) {
    line = model.token(i);
    for (Real x : model.input(i)) {
      line += ' ';
      line += format_number(x);
    }
    out << line << '\n';
  }
  finish_output(out, path);
}

template <std::floating_point Real>
void save_frequencies(const std::filesystem::path& path, const BasicEmbeddingModel<Real>& model) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.token(i) << ' ' << model.frequency(i) << '\n';
  }
  finish_output(out, path);
}

// Loads input vectors; frequencies are read from `freq_path` when given.
template <std::floating_point Real = float>
BasicEmbeddingModel<Real> load_embedding(const std::filesystem::path& path,
                                         const std::filesystem::path& freq_path = {}) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty embedding file");
  const auto header = split_ws(line);
  std::size_t n = 0, dim = 0;
  if (header.size() != 2 || !parse_number(header[0], n) || !parse_number(header[1], dim) ||
      dim == 0) {
    throw Error(path.string() + ": bad header, expected '<vocab size> <dimension>'");
  }
  std::vector<std::string> vocab;
  std::vector<Real> values;
  values.reserve(n * dim);
  while (std::getline(in, line)) {
    const auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() != dim + 1) {
      throw Error(path.string() + ": row " + std::to_string(vocab.size() + 1) + " has " +
                  std::to_string(f.size() - 1) + " values, expected " + std::to_string(dim));
    }
    vocab.emplace_back(f[0]);
    for (std::size_t d = 1; d <= dim; ++d) {
      Real x{};
      if (!parse_number(f[d], x) || !std::isfinite(x)) {
        throw Error(path.string() + ": bad number in row " + std::to_string(vocab.size()));
      }
      values.push_back(x);
    }
  }
  if (vocab.size() != n) {
    throw Error(path.string() + ": header promises " + std::to_string(n) + " rows, found " +
                std::to_string(vocab.size()));
  }
  std::vector<std::uint64_t> freq(n, 0);
  if (!freq_path.empty()) {
    std::unordered_map<std::string, std::uint64_t> table;
    auto fin = open_input(freq_path);
    while (std::getline(fin, line)) {
      const auto f = split_ws(line);
      std::uint64_t c = 0;
      if (f.size() != 2 || !parse_number(f[1], c)) {
        throw Error(freq_path.string() + ": malformed frequency line");
      }
      table[std::string(f[0])] = c;
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto it = table.find(vocab[i]);
      if (it != table.end()) freq[i] = it->second;
    }
  }
  BasicEmbeddingModel<Real> model(std::move(vocab), dim, std::move(freq), false);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * dim), dim,
                model.input(i).begin());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Phi: hyponym vector -> hypernym vector.
//
// Offset mode minimizes (1/N) sum ||(x + phi) - y||^2, whose minimizer is the
// mean difference. Matrix mode minimizes sum ||Phi x - y||^2 + ridge ||Phi||^2,
// i.e. solves (X^T X + ridge I) Phi^T = X^T Y.

enum class PhiMode { Offset, Matrix };

inline std::string_view to_string(PhiMode mode) {
  return mode == PhiMode::Offset ? "offset" : "matrix";
}

inline PhiMode parse_phi_mode(std::string_view text) {
  if (text == "offset") return PhiMode::Offset;
  if (text == "matrix") return PhiMode::Matrix;
  throw Error("unknown phi mode '" + std::string(text) + "' (expected offset or matrix)");
}

struct PhiTransform {
  PhiMode mode = PhiMode::Offset;
  Eigen::VectorXd offset;  // Offset mode
  Eigen::MatrixXd matrix;  // Matrix mode
  double ridge = 0.0;

  std::size_t dimension() const {
    return static_cast<std::size_t>(mode == PhiMode::Offset ? offset.size() : matrix.rows());
  }

  template <typename Real>
  Eigen::VectorXd apply(std::span<const Real> x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t d = 0; d < x.size(); ++d) v[static_cast<Eigen::Index>(d)] = x[d];
    return mode == PhiMode::Offset ? Eigen::VectorXd(v + offset) : Eigen::VectorXd(matrix * v);
  }
};

struct TermPair {
  std::string hyponym;   // internal form
  std::string hypernym;  // internal form
};

struct PhiFit {
  PhiTransform phi;
  std::size_t used_pairs = 0;
  std::size_t skipped_pairs = 0;  // a term was missing from the embedding
};

template <std::floating_point Real>
PhiFit fit_phi(std::span<const TermPair> pairs, const BasicEmbeddingModel<Real>& model,
               PhiMode mode, double ridge = 0.0) {
  if (ridge < 0.0) throw Error("ridge must be non-negative");
  std::vector<std::pair<std::size_t, std::size_t>> usable;
  PhiFit fit;
  for (const auto& p : pairs) {
    auto x = model.index_of(p.hyponym);
    auto y = model.index_of(p.hypernym);
    if (x && y) {
      usable.emplace_back(*x, *y);
    } else {
      ++fit.skipped_pairs;
    }
  }
  fit.used_pairs = usable.size();
  if (usable.empty()) throw Error("no training pair has both terms in the embedding");

  const auto dim = static_cast<Eigen::Index>(model.dimension());
  auto row = [&](std::size_t i) {
    auto v = model.input(i);
    Eigen::VectorXd out(dim);
    for (Eigen::Index d = 0; d < dim; ++d) out[d] = v[static_cast<std::size_t>(d)];
    return out;
  };
  fit.phi.mode = mode;
  fit.phi.ridge = ridge;
  if (mode == PhiMode::Offset) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (auto [x, y] : usable) sum += row(y) - row(x);
    fit.phi.offset = sum / static_cast<double>(usable.size());
    return fit;
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(dim, dim);
  for (auto [x, y] : usable) {
    const Eigen::VectorXd xv = row(x);
    gram.noalias() += xv * xv.transpose();
    cross.noalias() += xv * row(y).transpose();
  }
  gram.diagonal().array() += ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw Error("phi normal equations could not be factored");
  Eigen::MatrixXd phi_t = ldlt.solve(cross);
  phi_t += ldlt.solve(cross - gram * phi_t);  // one step of iterative refinement
  if (!phi_t.allFinite() || ((gram * phi_t - cross).norm() > 1e-6 * (1.0 + cross.norm()))) {
    throw Error("phi normal equations are singular; increase --ridge");
  }
  fit.phi.matrix = phi_t.transpose();
  return fit;
}

inline void save_phi(const std::filesystem::path& path, const PhiTransform& phi) {
  auto out = open_output(path);
  out << to_string(phi.mode) << '\n';
  if (phi.mode == PhiMode::Offset) {
    for (Eigen::Index d = 0; d < phi.offset.size(); ++d) {
      out << (d ? " " : "") << format_number(phi.offset[d]);
    }
    out << '\n';
  } else {
    out << phi.matrix.rows() << '\n';
    for (Eigen::Index r = 0; r < phi.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < phi.matrix.cols(); ++c) {
        out << (c ? " " : "") << format_number(phi.matrix(r, c));
      }
      out << '\n';
    }
  }
  finish_output(out, path);
}

inline PhiTransform load_phi(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty phi file");
  PhiTransform phi;
  phi.mode = parse_phi_mode(strip_cr(line));
  auto read_row = [&](std::vector<double>& row) {
    if (!std::getline(in, line)) throw Error(path.string() + ": truncated phi file");
    row.clear();
    for (auto f : split_ws(line)) {
      double x = 0;
      if (!parse_number(f, x) || !std::isfinite(x)) throw Error(path.string() + ": bad number");
      row.push_back(x);
    }
  };
  std::vector<double> row;
  if (phi.mode == PhiMode::Offset) {
    read_row(row);
    if (row.empty()) throw Error(path.string() + ": empty offset vector");
    phi.offset = Eigen::Map<Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    return phi;
  }
  std::size_t dim = 0;
  if (!std::getline(in, line) || !parse_number(std::string_view(strip_cr(line)), dim) || dim == 0) {
    throw Error(path.string() + ": bad matrix dimension header");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  phi.matrix.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    read_row(row);
    if (row.size() != dim) throw Error(path.string() + ": matrix row has wrong length");
    for (Eigen::Index c = 0; c < n; ++c) phi.matrix(r, c) = row[static_cast<std::size_t>(c)];
  }
  return phi;
}

// Vocabulary terms nearest (Euclidean) to phi(vec(q)); the query itself is
// excluded. Score = 1 / (1 + distance).
template <std::floating_point Real>
std::vector<ScoredCandidate> candidates_from_phi(const PhiTransform& phi,
                                                 const BasicEmbeddingModel<Real>& model,
                                                 const std::string& query_term,
                                                 const CandidateVocabulary* vocab,
                                                 std::size_t k = kMaxCandidates) {
  auto q = model.index_of(query_term);
  if (!q) return {};
  if (phi.dimension() != model.dimension()) {
    throw Error("phi dimension " + std::to_string(phi.dimension()) +
                " does not match embedding dimension " + std::to_string(model.dimension()));
  }
  const Eigen::VectorXd target = phi.apply(model.input(*q));
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i == *q) continue;
    if (vocab && !vocab->contains(model.token(i))) continue;
    auto v = model.input(i);
    double s = 0.0;
    for (std::size_t d = 0; d < v.size(); ++d) {
      const double diff = static_cast<double>(v[d]) - target[static_cast<Eigen::Index>(d)];
      s += diff * diff;
    }
    scored.emplace_back(std::sqrt(s), i);
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), [&](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first < b.first
                                                : model.token(a.second) < model.token(b.second);
                    });
  std::vector<ScoredCandidate> out;
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({model.token(scored[i].second), 1.0 / (1.0 + scored[i].first), Source::Phi});
  }
  return out;
}

}  // namespace hyperdisc

#endif  // HYPERDISC_EMBEDDING_HPP_
