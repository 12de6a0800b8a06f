#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "bilex/alias.hpp"
#include "bilex/embedding.hpp"
#include "bilex/error.hpp"
#include "bilex/graph.hpp"
#include "bilex/rng.hpp"

namespace bilex {

struct ContextPair {
  std::uint32_t center;
  std::uint32_t context;
  bool operator==(const ContextPair&) const = default;
  auto operator<=>(const ContextPair&) const = default;
};

using Sequences = std::vector<std::vector<std::uint32_t>>;

// Calls fn(center, context) for every position i of every sequence and
// every j != i with |i - j| <= window.
template <typename Fn>
void for_each_pair(const Sequences& sequences, std::size_t window, Fn&& fn) {
  for (const auto& seq : sequences) {
    const std::size_t n = seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > window ? i - window : 0;
      const std::size_t hi = std::min(n - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) fn(seq[i], seq[j]);
      }
    }
  }
}

std::uint64_t count_pairs(const Sequences& sequences, std::size_t window);
std::vector<ContextPair> pairs_from_walks(const WalkCorpus& walks, std::size_t window);
std::vector<ContextPair> pairs_from_corpus(const std::vector<Sentence>& sentences, std::size_t window);

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t window = 10;
  std::size_t negatives = 5;
  std::size_t epochs = 100;
  double initial_lr = 0.025;
  double final_lr = 1e-4;
  std::uint64_t seed = 1;
  double noise_exponent = 0.75;
  // 1 = deterministic single-threaded mode; >1 = lock-free asynchronous updates
  std::size_t threads = 1;

  void validate() const;
};

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// log(sigmoid(x)) without overflow.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

template <typename Scalar>
struct PairGradient {
  Scalar loss;
  Vector<Scalar> center;         // dL/d in_c
  Vector<Scalar> context;        // dL/d out_ctx
  RowMatrix<Scalar> negatives;   // row k: dL/d out_neg_k
};

// L = -log s(<c, o>) - sum_k log s(-<c, n_k>)
template <typename Scalar>
PairGradient<Scalar> pair_loss_gradient(const Eigen::Ref<const Vector<Scalar>>& center,
                                        const Eigen::Ref<const Vector<Scalar>>& context,
                                        const Eigen::Ref<const RowMatrix<Scalar>>& negatives) {
  PairGradient<Scalar> g;
  const Scalar pos = center.dot(context);
  g.loss = -log_sigmoid(pos);
  const Scalar gpos = sigmoid(pos) - Scalar(1);
  g.center = gpos * context;
  g.context = gpos * center;
  g.negatives.resize(negatives.rows(), center.size());
  for (Eigen::Index k = 0; k < negatives.rows(); ++k) {
    const Scalar s = negatives.row(k).dot(center);
    g.loss -= log_sigmoid(-s);
    const Scalar gneg = sigmoid(s);
    g.center += gneg * negatives.row(k).transpose();
    g.negatives.row(k) = gneg * center.transpose();
  }
  return g;
}

template <typename Scalar>
Scalar pair_loss(const Eigen::Ref<const Vector<Scalar>>& center, const Eigen::Ref<const Vector<Scalar>>& context,
                 const Eigen::Ref<const RowMatrix<Scalar>>& negatives) {
  Scalar loss = -log_sigmoid(center.dot(context));
  for (Eigen::Index k = 0; k < negatives.rows(); ++k) loss -= log_sigmoid(-Scalar(negatives.row(k).dot(center)));
  return loss;
}

// One plain SGD step on the pair loss over raw rows of length d. Output rows
// are updated in turn against the unchanged center, whose accumulated step
// is applied last. Returns false if a score is non-finite.
template <typename Scalar>
bool sgd_pair_update(Scalar* center, Scalar* context, const std::vector<Scalar*>& negatives,
                     Eigen::Index d, Scalar lr, Scalar* scratch) {
  using Map = Eigen::Map<Vector<Scalar>>;
  Map c(center, d);
  Map acc(scratch, d);
  acc.setZero();
  auto visit = [&](Scalar* row, Scalar label) {
    Map o(row, d);
    const Scalar f = c.dot(o);
    if (!std::isfinite(f)) return false;
    const Scalar step = lr * (label - sigmoid(f));
    acc.noalias() += step * o;
    o.noalias() += step * c;
    return true;
  };
  if (!visit(context, Scalar(1))) return false;
  for (Scalar* n : negatives) {
    if (!visit(n, Scalar(0))) return false;
  }
  c += acc;
  return true;
}

// Rows uniform in [-0.5/d, 0.5/d] for both parameter sets.
template <typename Scalar>
EmbeddingMatrix<Scalar> initialize_embeddings(std::vector<std::string> vocab, const TrainConfig& config) {
  const auto n = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(config.dim);
  RowMatrix<Scalar> in(n, d), out(n, d);
  Rng rng(derive_seed(config.seed, "sgns-init"));
  const double half = 0.5 / static_cast<double>(d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) in(i, j) = static_cast<Scalar>((uniform01(rng) * 2.0 - 1.0) * half);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = static_cast<Scalar>((uniform01(rng) * 2.0 - 1.0) * half);
  return EmbeddingMatrix<Scalar>(std::move(vocab), std::move(in), std::move(out));
}

// Noise distribution: occurrence counts in the sequences raised to `exponent`.
AliasTable noise_table(const Sequences& sequences, std::size_t vocab_size, double exponent);

// Draws `negatives` noise ids per pair, skipping the positive context.
std::vector<std::uint32_t> draw_negatives(const AliasTable& noise, std::uint32_t context, std::size_t negatives,
                                          Rng& rng);

// Mean pair loss over fixed pairs and their fixed negative samples.
template <typename Scalar>
double mean_pair_loss(const EmbeddingMatrix<Scalar>& emb, const std::vector<ContextPair>& pairs,
                      const std::vector<std::vector<std::uint32_t>>& negatives) {
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    RowMatrix<Scalar> neg(static_cast<Eigen::Index>(negatives[i].size()), emb.dim());
    for (std::size_t k = 0; k < negatives[i].size(); ++k) neg.row(static_cast<Eigen::Index>(k)) = emb.context().row(negatives[i][k]);
    total += static_cast<double>(pair_loss<Scalar>(emb.vectors().row(pairs[i].center).transpose(),
                                                   emb.context().row(pairs[i].context).transpose(), neg));
  }
  return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
}

namespace detail {

struct TrainRange {
  std::size_t first_sequence;
  std::size_t last_sequence;
};

template <typename Scalar>
void train_range(EmbeddingMatrix<Scalar>& emb, const Sequences& sequences, TrainRange range,
                 const TrainConfig& config, const AliasTable& noise, Rng& rng, std::atomic<std::uint64_t>& done,
                 std::uint64_t total, std::size_t epoch) {
  const Eigen::Index d = emb.dim();
  Scalar* in = emb.vectors().data();
  Scalar* out = emb.context().data();
  std::vector<Scalar> scratch(static_cast<std::size_t>(d));
  std::vector<Scalar*> neg_rows;
  neg_rows.reserve(config.negatives);
  const double lr_span = config.initial_lr - config.final_lr;
  std::uint64_t local = 0;
  std::uint64_t base = done.load(std::memory_order_relaxed);
  for (std::size_t s = range.first_sequence; s < range.last_sequence; ++s) {
    const auto& seq = sequences[s];
    const std::size_t n = seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > config.window ? i - config.window : 0;
      const std::size_t hi = std::min(n - 1, i + config.window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const std::uint32_t center = seq[i];
        const std::uint32_t context = seq[j];
        const double progress = static_cast<double>(base + local) / static_cast<double>(total);
        const auto lr = static_cast<Scalar>(config.initial_lr - lr_span * std::min(1.0, progress));
        neg_rows.clear();
        for (std::size_t k = 0; k < config.negatives; ++k) {
          const std::uint32_t w = noise.sample(rng());
          if (w == context) continue;
          neg_rows.push_back(out + static_cast<std::ptrdiff_t>(w) * d);
        }
        if (!sgd_pair_update<Scalar>(in + static_cast<std::ptrdiff_t>(center) * d,
                                     out + static_cast<std::ptrdiff_t>(context) * d, neg_rows, d, lr,
                                     scratch.data())) {
          throw NumericError("non-finite score in epoch " + std::to_string(epoch + 1) + " at pair (" +
                             emb.token(center) + ", " + emb.token(context) + "), learning rate " +
                             std::to_string(static_cast<double>(lr)));
        }
        if (++local == 4096) {
          base = done.fetch_add(local, std::memory_order_relaxed) + local;
          local = 0;
        }
      }
    }
  }
  done.fetch_add(local, std::memory_order_relaxed);
}

}  // namespace detail

// Skip-gram with negative sampling over (center, context) pairs generated
// from `sequences` with the configured window. `vocab[i]` names id i.
template <typename Scalar>
EmbeddingMatrix<Scalar> train(const Sequences& sequences, std::vector<std::string> vocab, const TrainConfig& config) {
  config.validate();
  const std::uint64_t per_epoch = count_pairs(sequences, config.window);
  if (per_epoch == 0) throw Error("training stream is empty: no (center, context) pairs");
  for (const auto& seq : sequences)
    for (auto id : seq)
      if (id >= vocab.size()) throw ParameterError("sequence id out of vocabulary range");

  EmbeddingMatrix<Scalar> emb = initialize_embeddings<Scalar>(std::move(vocab), config);
  const AliasTable noise = noise_table(sequences, static_cast<std::size_t>(emb.size()), config.noise_exponent);
  const std::uint64_t total = per_epoch * config.epochs;
  std::atomic<std::uint64_t> done{0};

  if (config.threads <= 1) {
    Rng rng(derive_seed(config.seed, "sgns-negatives"));
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      detail::train_range(emb, sequences, {0, sequences.size()}, config, noise, rng, done, total, epoch);
    }
    return emb;
  }

  const std::size_t threads = std::min(config.threads, std::max<std::size_t>(1, sequences.size()));
  std::vector<Rng> rngs;
  for (std::size_t t = 0; t < threads; ++t) rngs.emplace_back(derive_seed(config.seed, "sgns-negatives", t));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t t = 0; t < threads; ++t) {
      const detail::TrainRange range{sequences.size() * t / threads, sequences.size() * (t + 1) / threads};
      workers.emplace_back([&, t, range] {
        try {
          detail::train_range(emb, sequences, range, config, noise, rngs[t], done, total, epoch);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }
  return emb;
}

// p(u | f(v)) over every entry u, using the published vectors; max-shifted.
template <typename Scalar>
Eigen::VectorXd full_softmax(const EmbeddingMatrix<Scalar>& emb, Eigen::Index v) {
  const Eigen::MatrixXd vecs = emb.vectors().template cast<double>();
  Eigen::VectorXd scores = vecs * vecs.row(v).transpose();
  scores = (scores.array() - scores.maxCoeff()).exp();
  return scores / scores.sum();
}

}  // namespace bilex
