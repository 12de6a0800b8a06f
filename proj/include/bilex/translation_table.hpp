#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "bilex/corpus.hpp"

namespace bilex {

enum class ScoreKind { probability, association };

const char* to_string(ScoreKind kind);

struct Candidate {
  TokenId target;
  double score;
  bool operator==(const Candidate&) const = default;
};

// Per-source-word scored candidate lists. Rows are kept sorted by descending
// score, ties by ascending target id.
struct TranslationTable {
  LanguageTag from;
  LanguageTag to;
  ScoreKind score_kind = ScoreKind::probability;
  std::vector<std::vector<Candidate>> rows;  // indexed by source id

  std::size_t num_rows() const { return rows.size(); }
  bool empty() const;
};

void sort_row(std::vector<Candidate>& row);

// Row maximum, ties broken by smaller target id. nullopt for unknown or empty rows.
std::optional<Candidate> best_translation(const TranslationTable& table, TokenId source);

// Checks sortedness, uniqueness and, for probability tables, row sums.
void validate(const TranslationTable& table);

// Header "#table<TAB>from=..<TAB>to=..<TAB>score_kind=..", then
// source_token<TAB>target_token<TAB>score lines.
void write_table(const TranslationTable& table, const Vocabulary& from_vocab,
                 const Vocabulary& to_vocab, const std::filesystem::path& path);
TranslationTable read_table(const std::filesystem::path& path, const Vocabulary& from_vocab,
                            const Vocabulary& to_vocab);

}  // namespace bilex
