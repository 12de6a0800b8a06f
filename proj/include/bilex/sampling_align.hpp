#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "bilex/corpus.hpp"
#include "bilex/rng.hpp"
#include "bilex/translation_table.hpp"

namespace bilex {

// Sub-corpus of pair indices: size k drawn with P(k) proportional to 1/k on
// [1, N], then k distinct indices uniformly without replacement. Sorted.
std::vector<std::size_t> sample_subcorpus(const ParallelCorpus& corpus, Rng& rng);

// Source and target words sharing one occurrence profile inside a sub-corpus.
struct AlignedGroup {
  std::vector<TokenId> src;  // sorted
  std::vector<TokenId> tgt;  // sorted
  bool operator==(const AlignedGroup&) const = default;
};

// Groups words of both languages by identical sets of sub-corpus sentences
// they occur in; groups without both languages are dropped. Output is
// ordered by the smallest source id of each group.
std::vector<AlignedGroup> perfect_alignments(const ParallelCorpus& corpus,
                                             std::span<const std::size_t> indices);

struct SamplingAccumulator {
  std::unordered_map<std::uint64_t, double> pair_counts;  // key = src << 32 | tgt
  std::vector<double> src_counts;
  std::vector<double> tgt_counts;
  std::size_t samples_run = 0;

  static std::uint64_t key(TokenId s, TokenId t) {
    return (static_cast<std::uint64_t>(s) << 32) | t;
  }
  // Adds the mass of one aligned group: 1/(|S||T|) per pair, 1/|S| per
  // source word, 1/|T| per target word.
  void add(const AlignedGroup& group);
  void merge(const SamplingAccumulator& other);
};

struct SamplingOptions {
  std::size_t num_samples = 50000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double time_budget_seconds = 0.0;  // 0 = unlimited
};

// Per-sample generators are seeded by derive_seed(seed, sample index), and
// samples are folded in fixed blocks merged in block order, so the result
// does not depend on the thread count.
SamplingAccumulator accumulate_samples(const ParallelCorpus& corpus, const SamplingOptions& options);

// score(s,t) = pair_counts(s,t) / src_counts(s); `reverse` scores target
// words instead, score(t,s) = pair_counts(s,t) / tgt_counts(t).
TranslationTable association_table(const SamplingAccumulator& acc, const ParallelCorpus& corpus,
                                   bool reverse = false);

TranslationTable run_sampling_alignment(const ParallelCorpus& corpus, const SamplingOptions& options);

}  // namespace bilex
