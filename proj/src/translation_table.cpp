#include "bilex/translation_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

const char* to_string(ScoreKind kind) {
  return kind == ScoreKind::probability ? "probability" : "association";
}

bool TranslationTable::empty() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.empty(); });
}

void sort_row(std::vector<Candidate>& row) {
  std::sort(row.begin(), row.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target < b.target;
  });
}

std::optional<Candidate> best_translation(const TranslationTable& table, TokenId source) {
  if (source >= table.rows.size() || table.rows[source].empty()) return std::nullopt;
  const auto& row = table.rows[source];
  Candidate best = row.front();
  for (const auto& c : row) {
    if (c.score > best.score || (c.score == best.score && c.target < best.target)) best = c;
  }
  return best;
}

void validate(const TranslationTable& table) {
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    const auto& row = table.rows[s];
    std::unordered_set<TokenId> seen;
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!seen.insert(row[i].target).second) {
        throw FormatError("duplicate target in row " + std::to_string(s));
      }
      if (i > 0 && (row[i - 1].score < row[i].score ||
                    (row[i - 1].score == row[i].score && row[i - 1].target > row[i].target))) {
        throw FormatError("row " + std::to_string(s) + " is not sorted");
      }
      if (!(row[i].score > 0.0) || row[i].score > 1.0) {
        throw FormatError("score out of range in row " + std::to_string(s));
      }
      sum += row[i].score;
    }
    if (table.score_kind == ScoreKind::probability && !row.empty() && std::abs(sum - 1.0) > 1e-9) {
      throw FormatError("probability row " + std::to_string(s) + " sums to " + format_double(sum));
    }
  }
}

void write_table(const TranslationTable& table, const Vocabulary& from_vocab,
                 const Vocabulary& to_vocab, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "#table\tfrom=" << table.from.code() << "\tto=" << table.to.code()
        << "\tscore_kind=" << to_string(table.score_kind) << '\n';
    for (std::size_t s = 0; s < table.rows.size(); ++s) {
      for (const auto& c : table.rows[s]) {
        out << from_vocab.token(static_cast<TokenId>(s)) << '\t' << to_vocab.token(c.target) << '\t'
            << format_double(c.score) << '\n';
      }
    }
  });
}

namespace {
std::string header_value(const std::string& field, const std::string& key) {
  if (field.rfind(key + "=", 0) != 0) throw FormatError("table header: expected " + key + "=");
  return field.substr(key.size() + 1);
}
}  // namespace

TranslationTable read_table(const std::filesystem::path& path, const Vocabulary& from_vocab,
                            const Vocabulary& to_vocab) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw FormatError(path.string() + ": missing header");
  const auto head = split(lines[0], '\t');
  if (head.size() != 4 || head[0] != "#table") throw FormatError(path.string() + ": bad header");
  TranslationTable table;
  table.from = LanguageTag(header_value(head[1], "from"));
  table.to = LanguageTag(header_value(head[2], "to"));
  const std::string kind = header_value(head[3], "score_kind");
  if (kind == "probability") table.score_kind = ScoreKind::probability;
  else if (kind == "association") table.score_kind = ScoreKind::association;
  else throw FormatError(path.string() + ": unknown score_kind '" + kind + "'");
  if (table.from != from_vocab.language() || table.to != to_vocab.language()) {
    throw FormatError(path.string() + ": direction does not match the supplied vocabularies");
  }
  table.rows.resize(from_vocab.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 3) throw FormatError(path.string() + ": expected 3 columns at line " + std::to_string(i + 1));
    const auto s = from_vocab.id_of(cols[0]);
    const auto t = to_vocab.id_of(cols[1]);
    if (!s || !t) throw FormatError(path.string() + ": unknown token at line " + std::to_string(i + 1));
    table.rows[*s].push_back({*t, parse_double(cols[2], "score")});
  }
  validate(table);
  return table;
}

}  // namespace bilex
