#include "bilex/ibm1.hpp"

#include <algorithm>
#include <cmath>

#include "bilex/error.hpp"

namespace bilex {

Ibm1Trainer::Ibm1Trainer(const ParallelCorpus& corpus, bool null_word)
    : corpus_(corpus),
      null_word_(null_word),
      num_sources_(corpus.src_vocab.size() + (null_word ? 1 : 0)) {
  if (corpus.empty()) throw EmptyInputError("IBM Model 1 needs a non-empty corpus");

  std::vector<std::vector<TokenId>> cooc(num_sources_);
  for (const auto& p : corpus.pairs) {
    for (TokenId e : p.src) cooc[e].insert(cooc[e].end(), p.tgt.begin(), p.tgt.end());
    if (null_word_) {
      auto& n = cooc[null_source()];
      n.insert(n.end(), p.tgt.begin(), p.tgt.end());
    }
  }
  offsets_.assign(num_sources_ + 1, 0);
  for (std::size_t e = 0; e < num_sources_; ++e) {
    auto& v = cooc[e];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    offsets_[e + 1] = offsets_[e] + v.size();
  }
  targets_.reserve(offsets_.back());
  probs_.reserve(offsets_.back());
  for (std::size_t e = 0; e < num_sources_; ++e) {
    const double uniform = cooc[e].empty() ? 0.0 : 1.0 / static_cast<double>(cooc[e].size());
    for (TokenId f : cooc[e]) {
      targets_.push_back(f);
      probs_.push_back(uniform);
    }
  }
}

std::size_t Ibm1Trainer::slot(TokenId source, TokenId target) const {
  const auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[source]);
  const auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[source + 1]);
  const auto it = std::lower_bound(first, last, target);
  if (it == last || *it != target) return targets_.size();
  return static_cast<std::size_t>(it - targets_.begin());
}

double Ibm1Trainer::prob(TokenId target, TokenId source) const {
  if (source >= num_sources_) return 0.0;
  const std::size_t s = slot(source, target);
  return s == targets_.size() ? 0.0 : probs_[s];
}

void Ibm1Trainer::step() {
  std::vector<double> counts(probs_.size(), 0.0);
  std::vector<std::size_t> slots;
  for (const auto& p : corpus_.pairs) {
    const std::size_t width = p.src.size() + (null_word_ ? 1 : 0);
    for (TokenId f : p.tgt) {
      slots.clear();
      double denom = 0.0;
      for (TokenId e : p.src) {
        slots.push_back(slot(e, f));
        denom += probs_[slots.back()];
      }
      if (null_word_) {
        slots.push_back(slot(null_source(), f));
        denom += probs_[slots.back()];
      }
      for (std::size_t i = 0; i < width; ++i) counts[slots[i]] += probs_[slots[i]] / denom;
    }
  }
  for (std::size_t e = 0; e < num_sources_; ++e) {
    double total = 0.0;
    for (std::size_t s = offsets_[e]; s < offsets_[e + 1]; ++s) total += counts[s];
    if (total <= 0.0) continue;
    for (std::size_t s = offsets_[e]; s < offsets_[e + 1]; ++s) probs_[s] = counts[s] / total;
  }
  ++iterations_;
}

double Ibm1Trainer::log_likelihood() const {
  double ll = 0.0;
  for (const auto& p : corpus_.pairs) {
    const double width = static_cast<double>(p.src.size() + (null_word_ ? 1 : 0));
    for (TokenId f : p.tgt) {
      double sum = 0.0;
      for (TokenId e : p.src) sum += probs_[slot(e, f)];
      if (null_word_) sum += probs_[slot(null_source(), f)];
      ll += std::log(sum / width);
    }
  }
  return ll;
}

TranslationTable Ibm1Trainer::table(double prune_below) const {
  TranslationTable table;
  table.from = corpus_.src_vocab.language();
  table.to = corpus_.tgt_vocab.language();
  table.score_kind = ScoreKind::probability;
  table.rows.resize(corpus_.src_vocab.size());
  for (std::size_t e = 0; e < corpus_.src_vocab.size(); ++e) {
    auto& row = table.rows[e];
    double kept = 0.0;
    for (std::size_t s = offsets_[e]; s < offsets_[e + 1]; ++s) {
      if (probs_[s] >= prune_below && probs_[s] > 0.0) {
        row.push_back({targets_[s], probs_[s]});
        kept += probs_[s];
      }
    }
    for (auto& c : row) c.score /= kept;
    sort_row(row);
  }
  return table;
}

TranslationTable train_ibm1(const ParallelCorpus& corpus, const Ibm1Options& options) {
  if (options.iterations == 0) throw ParameterError("IBM Model 1 needs iterations >= 1");
  Ibm1Trainer trainer(corpus, options.null_word);
  for (std::size_t i = 0; i < options.iterations; ++i) trainer.step();
  return trainer.table(options.prune_below);
}

}  // namespace bilex
