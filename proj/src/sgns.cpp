#include "bilex/sgns.hpp"

namespace bilex {

void TrainConfig::validate() const {
  if (dim < 1) throw ParameterError("dim must be >= 1");
  if (window < 1) throw ParameterError("window must be >= 1");
  if (negatives < 1) throw ParameterError("negatives must be >= 1");
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  if (!(final_lr > 0.0) || !(final_lr <= initial_lr)) {
    throw ParameterError("learning rates must satisfy 0 < final_lr <= initial_lr");
  }
  if (!(noise_exponent >= 0.0 && noise_exponent <= 1.0)) throw ParameterError("noise_exponent must be in [0, 1]");
}

std::uint64_t count_pairs(const Sequences& sequences, std::size_t window) {
  std::uint64_t total = 0;
  for (const auto& seq : sequences) {
    const std::size_t n = seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > window ? i - window : 0;
      const std::size_t hi = std::min(n - 1, i + window);
      total += hi - lo;
    }
  }
  return total;
}

std::vector<ContextPair> pairs_from_walks(const WalkCorpus& walks, std::size_t window) {
  if (window < 1) throw ParameterError("window must be >= 1");
  std::vector<ContextPair> out;
  for_each_pair(walks.walks, window, [&](std::uint32_t c, std::uint32_t x) { out.push_back({c, x}); });
  return out;
}

std::vector<ContextPair> pairs_from_corpus(const std::vector<Sentence>& sentences, std::size_t window) {
  if (window < 1) throw ParameterError("window must be >= 1");
  std::vector<ContextPair> out;
  for_each_pair(sentences, window, [&](std::uint32_t c, std::uint32_t x) { out.push_back({c, x}); });
  return out;
}

AliasTable noise_table(const Sequences& sequences, std::size_t vocab_size, double exponent) {
  std::vector<double> counts(vocab_size, 0.0);
  for (const auto& seq : sequences)
    for (auto id : seq) counts[id] += 1.0;
  for (auto& c : counts) c = c > 0.0 ? std::pow(c, exponent) : 0.0;
  return AliasTable(counts);
}

std::vector<std::uint32_t> draw_negatives(const AliasTable& noise, std::uint32_t context, std::size_t negatives,
                                          Rng& rng) {
  std::vector<std::uint32_t> out;
  for (std::size_t k = 0; k < negatives; ++k) {
    const std::uint32_t w = noise.sample(rng());
    if (w != context) out.push_back(w);
  }
  return out;
}

}  // namespace bilex
