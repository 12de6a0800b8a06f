#include "bilex/lexicon.hpp"

#include <algorithm>
#include <map>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

std::vector<SymmetricPair> symmetric_pairs(const TranslationTable& fwd, const TranslationTable& rev) {
  if (fwd.from != rev.to || fwd.to != rev.from) {
    throw ParameterError("symmetric_pairs: tables must have opposite directions (got " + fwd.from.code() +
                         "->" + fwd.to.code() + " and " + rev.from.code() + "->" + rev.to.code() + ")");
  }
  std::vector<SymmetricPair> out;
  for (std::size_t s = 0; s < fwd.rows.size(); ++s) {
    const auto best = best_translation(fwd, static_cast<TokenId>(s));
    if (!best) continue;
    const auto back = best_translation(rev, best->target);
    if (back && back->target == s) {
      out.push_back({static_cast<TokenId>(s), best->target, std::min(best->score, back->score)});
    }
  }
  return out;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ibm1: return "ibm1";
    case Provenance::sampling: return "sampling";
    case Provenance::both: return "both";
  }
  return "?";
}

Provenance parse_provenance(const std::string& text) {
  if (text == "ibm1") return Provenance::ibm1;
  if (text == "sampling") return Provenance::sampling;
  if (text == "both") return Provenance::both;
  throw FormatError("unknown provenance '" + text + "'");
}

SeedLexicon build_seed_lexicon(const std::vector<SymmetricPair>& ibm1_pairs,
                               const std::vector<SymmetricPair>& sampling_pairs,
                               const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
                               std::size_t cut, const std::set<std::string>& exclude_sources) {
  if (cut == 0) throw ParameterError("seed lexicon cut must be >= 1");
  if (ibm1_pairs.empty() && sampling_pairs.empty()) {
    throw EmptyInputError("no symmetric pairs from either aligner; cannot build a seed lexicon");
  }

  struct Merged {
    double ibm1 = -1.0;
    double sampling = -1.0;
  };
  std::map<std::pair<TokenId, TokenId>, Merged> merged;
  for (const auto& p : ibm1_pairs) merged[{p.src, p.tgt}].ibm1 = p.score;
  for (const auto& p : sampling_pairs) merged[{p.src, p.tgt}].sampling = p.score;

  std::vector<LexiconEntry> entries;
  for (const auto& [key, m] : merged) {
    LexiconEntry e;
    e.src = src_vocab.token(key.first);
    e.tgt = tgt_vocab.token(key.second);
    if (exclude_sources.count(e.src)) continue;
    if (m.ibm1 >= 0.0 && m.sampling >= 0.0) {
      e.tier = 1;
      e.provenance = Provenance::both;
      e.score = std::min(m.ibm1, m.sampling);
    } else {
      e.tier = 2;
      e.provenance = m.ibm1 >= 0.0 ? Provenance::ibm1 : Provenance::sampling;
      e.score = std::max(m.ibm1, m.sampling);
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
    if (a.tier != b.tier) return a.tier < b.tier;
    if (a.score != b.score) return a.score > b.score;
    if (a.src != b.src) return a.src < b.src;
    return a.tgt < b.tgt;
  });
  if (entries.size() > cut) entries.resize(cut);
  return {std::move(entries), cut};
}

void write_lexicon(const SeedLexicon& lexicon, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& e : lexicon.entries) {
      out << e.src << '\t' << e.tgt << '\t' << e.tier << '\t' << to_string(e.provenance) << '\t'
          << format_double(e.score) << '\n';
    }
  });
}

SeedLexicon read_lexicon(const std::filesystem::path& path) {
  SeedLexicon lexicon;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 5) throw FormatError(path.string() + ": expected 5 columns at line " + std::to_string(i + 1));
    LexiconEntry e;
    e.src = cols[0];
    e.tgt = cols[1];
    e.tier = static_cast<int>(parse_int(cols[2], "tier"));
    if (e.tier != 1 && e.tier != 2) throw FormatError(path.string() + ": tier must be 1 or 2");
    e.provenance = parse_provenance(cols[3]);
    if ((e.tier == 1) != (e.provenance == Provenance::both)) {
      throw FormatError(path.string() + ": tier 1 iff provenance=both");
    }
    e.score = parse_double(cols[4], "score");
    lexicon.entries.push_back(std::move(e));
  }
  lexicon.cut = lexicon.entries.size();
  return lexicon;
}

}  // namespace bilex
