#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bilex/retrieval.hpp"

namespace bilex {

struct SyntheticCorpus {
  std::vector<std::string> src_lines;
  std::vector<std::string> tgt_lines;
  GoldLexicon gold;  // the bijection
  // counts the generator declares for what it produced
  std::uint64_t tokens = 0;  // per side
  std::uint64_t src_types = 0;
  std::uint64_t tgt_types = 0;
};

// Bijective toy lexicon of vocab_size word pairs; source sentences of length
// 3..8 drawn from a Zipf(1) law over source words; each target sentence is
// the word-by-word image with a seeded local shuffle (window 2).
SyntheticCorpus generate_synthetic(std::size_t vocab_size, std::size_t sentences, std::uint64_t seed);

// Writes src.txt, tgt.txt and gold.tsv into `dir`.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace bilex
