#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "bilex/corpus.hpp"
#include "bilex/translation_table.hpp"

namespace bilex {

struct SymmetricPair {
  TokenId src;
  TokenId tgt;
  double score;  // min of the two directional scores
  bool operator==(const SymmetricPair&) const = default;
};

// (s,t) such that s's best translation is t and t's best translation is s.
// `fwd` maps source->target, `rev` target->source. Sorted by (src, tgt).
std::vector<SymmetricPair> symmetric_pairs(const TranslationTable& fwd, const TranslationTable& rev);

enum class Provenance { ibm1, sampling, both };

const char* to_string(Provenance p);
Provenance parse_provenance(const std::string& text);

struct LexiconEntry {
  std::string src;
  std::string tgt;
  int tier = 2;
  Provenance provenance = Provenance::sampling;
  double score = 0.0;
  bool operator==(const LexiconEntry&) const = default;
};

struct SeedLexicon {
  std::vector<LexiconEntry> entries;
  std::size_t cut = 0;
};

// Tier 1: pairs symmetric under both aligners; tier 2: pairs symmetric under
// exactly one. Within a tier entries are ordered by descending score, then
// source token, then target token. Sources listed in `exclude_sources` are
// removed before the cut.
SeedLexicon build_seed_lexicon(const std::vector<SymmetricPair>& ibm1_pairs,
                               const std::vector<SymmetricPair>& sampling_pairs,
                               const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
                               std::size_t cut,
                               const std::set<std::string>& exclude_sources = {});

// src<TAB>tgt<TAB>tier<TAB>provenance<TAB>score
void write_lexicon(const SeedLexicon& lexicon, const std::filesystem::path& path);
SeedLexicon read_lexicon(const std::filesystem::path& path);

}  // namespace bilex
