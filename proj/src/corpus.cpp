#include "bilex/corpus.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

LanguageTag::LanguageTag(std::string code) : code_(std::move(code)) {
  if (code_.empty()) throw ParameterError("language tag must be non-empty");
  if (code_.find_first_of(": \t\n") != std::string::npos) {
    throw ParameterError("language tag '" + code_ + "' contains ':' or whitespace");
  }
}

TokenId Vocabulary::add(std::string_view token) {
  if (auto it = index_.find(token); it != index_.end()) {
    ++counts_[it->second];
    return it->second;
  }
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  counts_.push_back(1);
  index_.emplace(tokens_.back(), id);
  return id;
}

void Vocabulary::insert(std::string token, std::uint64_t count) {
  if (count == 0) throw FormatError("vocabulary count must be >= 1 for '" + token + "'");
  if (index_.count(token) != 0) throw FormatError("duplicate vocabulary token '" + token + "'");
  const auto id = static_cast<TokenId>(tokens_.size());
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

std::optional<TokenId> Vocabulary::id_of(std::string_view token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return std::nullopt;
}

namespace {

icu::UnicodeString decode_utf8(std::string_view line) {
  UErrorCode status = U_ZERO_ERROR;
  int32_t needed = 0;
  u_strFromUTF8(nullptr, 0, &needed, line.data(), static_cast<int32_t>(line.size()), &status);
  if (status == U_BUFFER_OVERFLOW_ERROR) status = U_ZERO_ERROR;
  if (U_FAILURE(status)) throw EncodingError("invalid UTF-8");
  return icu::UnicodeString::fromUTF8(icu::StringPiece(line.data(), static_cast<int32_t>(line.size())));
}

icu::UnicodeString nfc(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = norm->normalize(s, status);
  if (U_FAILURE(status)) throw EncodingError("NFC normalization failed");
  return out;
}

void flush_token(const icu::UnicodeString& text, int32_t begin, int32_t end,
                 std::vector<std::string>& out) {
  // Strip punctuation code points from both ends.
  while (begin < end) {
    const UChar32 c = text.char32At(begin);
    if (!u_ispunct(c)) break;
    begin = text.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = text.moveIndex32(end, -1);
    if (!u_ispunct(text.char32At(prev))) break;
    end = prev;
  }
  if (begin >= end) return;
  std::string utf8;
  text.tempSubStringBetween(begin, end).toUTF8String(utf8);
  out.push_back(std::move(utf8));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
  icu::UnicodeString text = nfc(decode_utf8(line));
  text.toLower(icu::Locale::getRoot());
  text = nfc(text);

  std::vector<std::string> tokens;
  int32_t start = -1;
  int32_t i = 0;
  while (i < text.length()) {
    const UChar32 c = text.char32At(i);
    const int32_t next = text.moveIndex32(i, 1);
    if (u_isUWhiteSpace(c)) {
      if (start >= 0) flush_token(text, start, i, tokens);
      start = -1;
    } else if (start < 0) {
      start = i;
    }
    i = next;
  }
  if (start >= 0) flush_token(text, start, text.length(), tokens);
  return tokens;
}

namespace {

std::vector<std::string> tokenize_line(std::string_view line, std::size_t line_no,
                                       std::string_view side) {
  try {
    return tokenize(line);
  } catch (const EncodingError& e) {
    throw EncodingError(std::string(e.what()) + " in " + std::string(side) + " line " +
                        std::to_string(line_no));
  }
}

void append_pair(ParallelCorpus& corpus, const std::vector<std::string>& src,
                 const std::vector<std::string>& tgt) {
  if (src.empty() || tgt.empty()) {
    ++corpus.dropped_pairs;
    return;
  }
  SentencePair pair;
  pair.src.reserve(src.size());
  pair.tgt.reserve(tgt.size());
  for (const auto& t : src) pair.src.push_back(corpus.src_vocab.add(t));
  for (const auto& t : tgt) pair.tgt.push_back(corpus.tgt_vocab.add(t));
  corpus.pairs.push_back(std::move(pair));
}

}  // namespace

ParallelCorpus ingest_parallel(const std::vector<std::string>& src_lines,
                               const std::vector<std::string>& tgt_lines,
                               const LanguageTag& src_lang, const LanguageTag& tgt_lang) {
  if (src_lang == tgt_lang) throw ParameterError("source and target language tags must differ");
  if (src_lines.size() != tgt_lines.size()) {
    throw AlignmentError("line count mismatch: source has " + std::to_string(src_lines.size()) +
                         " lines, target has " + std::to_string(tgt_lines.size()));
  }
  ParallelCorpus corpus{Vocabulary(src_lang), Vocabulary(tgt_lang), {}, 0};
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    append_pair(corpus, tokenize_line(src_lines[i], i + 1, "source"),
                tokenize_line(tgt_lines[i], i + 1, "target"));
  }
  return corpus;
}

ParallelCorpus ingest_tsv(const std::vector<std::string>& lines, const LanguageTag& src_lang,
                          const LanguageTag& tgt_lang) {
  std::vector<std::string> src, tgt;
  src.reserve(lines.size());
  tgt.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos || lines[i].find('\t', tab + 1) != std::string::npos) {
      throw AlignmentError("TSV line " + std::to_string(i + 1) + " must have exactly two columns");
    }
    src.push_back(lines[i].substr(0, tab));
    tgt.push_back(lines[i].substr(tab + 1));
  }
  return ingest_parallel(src, tgt, src_lang, tgt_lang);
}

CorpusStats corpus_stats(const ParallelCorpus& corpus) {
  CorpusStats stats;
  for (const auto& p : corpus.pairs) {
    stats.src.tokens += p.src.size();
    stats.tgt.tokens += p.tgt.size();
  }
  stats.src.types = corpus.src_vocab.size();
  stats.tgt.types = corpus.tgt_vocab.size();
  stats.src.sentences = stats.tgt.sentences = corpus.pairs.size();
  stats.dropped_pairs = corpus.dropped_pairs;
  return stats;
}

ParallelCorpus swapped(const ParallelCorpus& corpus) {
  ParallelCorpus out{corpus.tgt_vocab, corpus.src_vocab, {}, corpus.dropped_pairs};
  out.pairs.reserve(corpus.pairs.size());
  for (const auto& p : corpus.pairs) out.pairs.push_back({p.tgt, p.src});
  return out;
}

namespace {

void write_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (std::size_t id = 0; id < vocab.size(); ++id) {
      out << vocab.token(static_cast<TokenId>(id)) << '\t' << id << '\t'
          << vocab.count(static_cast<TokenId>(id)) << '\n';
    }
  });
}

Vocabulary read_vocab(const std::filesystem::path& path, LanguageTag lang) {
  Vocabulary vocab(std::move(lang));
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 3) throw FormatError(path.string() + ": expected 3 columns at line " + std::to_string(i + 1));
    if (parse_int(cols[1], "vocabulary id") != static_cast<long long>(i)) {
      throw FormatError(path.string() + ": ids must be dense and ordered");
    }
    vocab.insert(cols[0], static_cast<std::uint64_t>(parse_int(cols[2], "vocabulary count")));
  }
  return vocab;
}

void write_sentences(const ParallelCorpus& corpus, bool src, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& p : corpus.pairs) {
      const Sentence& s = src ? p.src : p.tgt;
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << '\n';
    }
  });
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path, std::size_t vocab_size) {
  std::vector<Sentence> out;
  for (const auto& line : read_lines(path)) {
    Sentence s;
    std::istringstream in(line);
    long long id = 0;
    while (in >> id) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
        throw FormatError(path.string() + ": token id out of range");
      }
      s.push_back(static_cast<TokenId>(id));
    }
    if (s.empty()) throw FormatError(path.string() + ": empty sentence");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_vocab(corpus.src_vocab, dir / "vocab.src.tsv");
  write_vocab(corpus.tgt_vocab, dir / "vocab.tgt.tsv");
  write_sentences(corpus, true, dir / "sentences.src.txt");
  write_sentences(corpus, false, dir / "sentences.tgt.txt");
  // meta last: its presence marks a complete corpus directory
  write_file_atomic(dir / "meta.tsv", [&](std::ostream& out) {
    out << "src_lang\t" << corpus.src_vocab.language().code() << '\n'
        << "tgt_lang\t" << corpus.tgt_vocab.language().code() << '\n'
        << "pairs\t" << corpus.pairs.size() << '\n'
        << "dropped_pairs\t" << corpus.dropped_pairs << '\n';
  });
}

ParallelCorpus read_corpus(const std::filesystem::path& dir) {
  std::string src_lang, tgt_lang;
  long long pairs = -1, dropped = 0;
  for (const auto& line : read_lines(dir / "meta.tsv")) {
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw FormatError("corpus meta: malformed line '" + line + "'");
    if (cols[0] == "src_lang") src_lang = cols[1];
    else if (cols[0] == "tgt_lang") tgt_lang = cols[1];
    else if (cols[0] == "pairs") pairs = parse_int(cols[1], "pairs");
    else if (cols[0] == "dropped_pairs") dropped = parse_int(cols[1], "dropped_pairs");
    else throw FormatError("corpus meta: unknown key '" + cols[0] + "'");
  }
  ParallelCorpus corpus;
  corpus.src_vocab = read_vocab(dir / "vocab.src.tsv", LanguageTag(src_lang));
  corpus.tgt_vocab = read_vocab(dir / "vocab.tgt.tsv", LanguageTag(tgt_lang));
  auto src = read_sentences(dir / "sentences.src.txt", corpus.src_vocab.size());
  auto tgt = read_sentences(dir / "sentences.tgt.txt", corpus.tgt_vocab.size());
  if (src.size() != tgt.size() || static_cast<long long>(src.size()) != pairs) {
    throw FormatError("corpus directory " + dir.string() + " has inconsistent sentence counts");
  }
  corpus.dropped_pairs = static_cast<std::size_t>(dropped);
  for (std::size_t i = 0; i < src.size(); ++i) corpus.pairs.push_back({std::move(src[i]), std::move(tgt[i])});
  return corpus;
}

}  // namespace bilex
