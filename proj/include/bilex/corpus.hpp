#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bilex {

using TokenId = std::uint32_t;
using Sentence = std::vector<TokenId>;

// Short language identifier ("es", "na", ...). Never empty.
class LanguageTag {
 public:
  LanguageTag() = default;
  explicit LanguageTag(std::string code);

  const std::string& code() const { return code_; }
  bool operator==(const LanguageTag&) const = default;

 private:
  std::string code_;
};

// Bijection token <-> dense id with occurrence counts. Ids are handed out in
// first-occurrence order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(LanguageTag language) : language_(std::move(language)) {}

  const LanguageTag& language() const { return language_; }
  std::size_t size() const { return tokens_.size(); }

  // Returns the id for `token`, inserting it if new, and bumps its count.
  TokenId add(std::string_view token);
  // Inserts with an explicit count; ids must arrive densely in order.
  void insert(std::string token, std::uint64_t count);

  std::optional<TokenId> id_of(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t count(TokenId id) const { return counts_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  LanguageTag language_;
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
};

struct SentencePair {
  Sentence src;
  Sentence tgt;
};

struct ParallelCorpus {
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  std::vector<SentencePair> pairs;
  std::size_t dropped_pairs = 0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct SideStats {
  std::uint64_t tokens = 0;
  std::uint64_t types = 0;
  std::uint64_t sentences = 0;
  bool operator==(const SideStats&) const = default;
};

struct CorpusStats {
  SideStats src;
  SideStats tgt;
  std::uint64_t dropped_pairs = 0;
  bool operator==(const CorpusStats&) const = default;
};

// NFC normalization, lowercasing, splitting on Unicode whitespace and
// stripping leading/trailing punctuation from each token. Throws
// EncodingError on malformed UTF-8.
std::vector<std::string> tokenize(std::string_view line);

ParallelCorpus ingest_parallel(const std::vector<std::string>& src_lines,
                               const std::vector<std::string>& tgt_lines,
                               const LanguageTag& src_lang = LanguageTag("es"),
                               const LanguageTag& tgt_lang = LanguageTag("na"));

// Lines of the form src<TAB>tgt.
ParallelCorpus ingest_tsv(const std::vector<std::string>& lines,
                          const LanguageTag& src_lang = LanguageTag("es"),
                          const LanguageTag& tgt_lang = LanguageTag("na"));

CorpusStats corpus_stats(const ParallelCorpus& corpus);

// Same corpus with the two languages exchanged.
ParallelCorpus swapped(const ParallelCorpus& corpus);

// Directory layout: meta.tsv, vocab.src.tsv, vocab.tgt.tsv (token<TAB>id<TAB>count),
// sentences.src.txt, sentences.tgt.txt (space-separated ids, one sentence per line).
void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& dir);
ParallelCorpus read_corpus(const std::filesystem::path& dir);

}  // namespace bilex
