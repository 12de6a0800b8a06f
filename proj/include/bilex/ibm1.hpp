#pragma once

#include <cstddef>
#include <vector>

#include "bilex/corpus.hpp"
#include "bilex/translation_table.hpp"

namespace bilex {

struct Ibm1Options {
  std::size_t iterations = 5;
  bool null_word = false;
  double prune_below = 1e-6;
};

// IBM Model 1 lexical translation model t(f|e), e a source word and f a
// target word, estimated by EM. Exposed as a stepping trainer so tests can
// compare every iteration against an independent recursion.
class Ibm1Trainer {
 public:
  Ibm1Trainer(const ParallelCorpus& corpus, bool null_word);

  // One E-step plus M-step.
  void step();
  std::size_t iterations_done() const { return iterations_; }

  // t(f|e); e == null_source() addresses the NULL word.
  double prob(TokenId target, TokenId source) const;
  TokenId null_source() const { return static_cast<TokenId>(num_sources_ - 1); }
  bool has_null() const { return null_word_; }

  // sum over pairs and target positions of log( sum_e t(f|e) / |e| ).
  double log_likelihood() const;

  // Final table with pruning below `prune_below`, rows renormalized. The
  // NULL row is not included.
  TranslationTable table(double prune_below) const;

 private:
  std::size_t slot(TokenId source, TokenId target) const;

  const ParallelCorpus& corpus_;
  bool null_word_;
  std::size_t num_sources_;
  std::size_t iterations_ = 0;
  // CSR over source words: co-occurring targets (sorted) and t(f|e).
  std::vector<std::size_t> offsets_;
  std::vector<TokenId> targets_;
  std::vector<double> probs_;
};

TranslationTable train_ibm1(const ParallelCorpus& corpus, const Ibm1Options& options = {});

}  // namespace bilex
