#include <map>
#include <random>

#include "bilex/corpus.hpp"
#include "bilex/error.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bilex;

TEST_CASE("tokenize lowercases, normalizes and strips edge punctuation") {
  CHECK(tokenize("Hola, Mundo!") == std::vector<std::string>{"hola", "mundo"});
  CHECK(tokenize("  \"¿Qué?\"  ") == std::vector<std::string>{"qué"});
  // decomposed e + combining acute composes to U+00E9
  CHECK(tokenize("Cafe\xCC\x81") == std::vector<std::string>{"caf\xC3\xA9"});
  CHECK(tokenize("in-law don't") == std::vector<std::string>{"in-law", "don't"});
  CHECK(tokenize("... -- !!").empty());
  // no-break space and ideographic space separate tokens
  CHECK(tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("ÑANDÚ") == std::vector<std::string>{"ñandú"});
}

TEST_CASE("two-pair toy corpus counts") {
  const auto c = ingest_parallel({"hola mundo", "hola"}, {"ab cd", "ab"});
  CHECK(c.size() == 2);
  const auto s = corpus_stats(c);
  CHECK(s.src.tokens == 3);
  CHECK(s.src.types == 2);
  CHECK(s.src.sentences == 2);
  CHECK(s.tgt.tokens == 3);
  CHECK(s.tgt.types == 2);
  CHECK(s.tgt.sentences == 2);
  CHECK(s.dropped_pairs == 0);
  CHECK(c.src_vocab.id_of("hola") == TokenId{0});
  CHECK(c.src_vocab.id_of("mundo") == TokenId{1});
  CHECK(c.src_vocab.count(0) == 2);
  CHECK(c.src_vocab.language().code() == "es");
  CHECK(c.tgt_vocab.language().code() == "na");
}

TEST_CASE("pairs empty on either side are dropped and counted") {
  const auto c = ingest_parallel({"", "x"}, {"y", "z"});
  CHECK(c.size() == 1);
  CHECK(c.dropped_pairs == 1);
  CHECK(corpus_stats(c).dropped_pairs == 1);
  const auto d = ingest_parallel({"a", "b"}, {"!!", "z"});
  CHECK(d.size() == 1);
  CHECK(d.src_vocab.id_of("a") == std::nullopt);
}

TEST_CASE("empty corpus stats are zero") {
  const auto s = corpus_stats(ingest_parallel({}, {}));
  CHECK(s.src.tokens == 0);
  CHECK(s.src.types == 0);
  CHECK(s.tgt.sentences == 0);
  CHECK(s.dropped_pairs == 0);
}

TEST_CASE("line-count mismatch names both counts") {
  try {
    ingest_parallel({"a", "b", "c"}, {"x"});
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('3') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }
}

TEST_CASE("undecodable bytes report the line number") {
  try {
    ingest_parallel({"ok", "fine", "bad \xFF byte"}, {"a", "b", "c"});
    FAIL("expected EncodingError");
  } catch (const EncodingError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_parallel({"a"}, {"\xC3"}), EncodingError);
}

TEST_CASE("tsv ingestion") {
  const auto c = ingest_tsv({"hola mundo\tab cd", "hola\tab"});
  CHECK(c.size() == 2);
  CHECK_THROWS_AS(ingest_tsv({"only one column"}), AlignmentError);
  CHECK_THROWS_AS(ingest_tsv({"a\tb\tc"}), AlignmentError);
}

TEST_CASE("language tags") {
  CHECK_THROWS_AS(LanguageTag(""), ParameterError);
  CHECK_THROWS_AS(LanguageTag("e s"), ParameterError);
  CHECK_THROWS_AS(ingest_parallel({"a"}, {"b"}, LanguageTag("xx"), LanguageTag("xx")), ParameterError);
}

namespace {

std::vector<std::string> random_lines(std::mt19937_64& rng, std::size_t n, const std::string& prefix) {
  std::uniform_int_distribution<int> len(0, 6), word(0, 30), punct(0, 5);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    for (int k = len(rng); k > 0; --k) {
      line += prefix + std::to_string(word(rng));
      if (punct(rng) == 0) line += ",";
      line += " ";
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("stats match an independent recount on random corpora") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto src = random_lines(rng, 60, "w");
    const auto tgt = random_lines(rng, 60, "v");
    const auto c = ingest_parallel(src, tgt);

    // recount: split on spaces, strip a trailing comma, skip pairs empty on a side
    auto toks = [](const std::string& line) {
      std::vector<std::string> out;
      std::string cur;
      for (char ch : line + " ") {
        if (ch == ' ') {
          if (!cur.empty()) out.push_back(cur);
          cur.clear();
        } else if (ch != ',') {
          cur += ch;
        }
      }
      return out;
    };
    std::size_t kept = 0, dropped = 0, src_tokens = 0, tgt_tokens = 0;
    std::map<std::string, std::uint64_t> src_counts, tgt_counts;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto a = toks(src[i]), b = toks(tgt[i]);
      if (a.empty() || b.empty()) {
        ++dropped;
        continue;
      }
      ++kept;
      src_tokens += a.size();
      tgt_tokens += b.size();
      for (const auto& w : a) ++src_counts[w];
      for (const auto& w : b) ++tgt_counts[w];
    }
    const auto s = corpus_stats(c);
    CHECK(s.src.sentences == kept);
    CHECK(s.tgt.sentences == kept);
    CHECK(s.dropped_pairs == dropped);
    CHECK(s.src.tokens == src_tokens);
    CHECK(s.tgt.tokens == tgt_tokens);
    CHECK(s.src.types == src_counts.size());
    CHECK(s.tgt.types == tgt_counts.size());
    for (const auto& [w, n] : src_counts) CHECK(c.src_vocab.count(*c.src_vocab.id_of(w)) == n);

    std::uint64_t total = 0;
    for (auto n : c.src_vocab.counts()) {
      CHECK(n >= 1);
      total += n;
    }
    CHECK(total == s.src.tokens);
    CHECK(s.src.types <= s.src.tokens);
  }
}

TEST_CASE("ids follow first occurrence and detokenized ids re-encode") {
  const std::vector<std::string> src = {"c b a", "a d", "b e c"};
  const std::vector<std::string> tgt = {"x", "y z", "z x"};
  const auto c = ingest_parallel(src, tgt);
  CHECK(c.src_vocab.tokens() == std::vector<std::string>{"c", "b", "a", "d", "e"});
  for (std::size_t i = 0; i < c.src_vocab.size(); ++i) {
    CHECK(c.src_vocab.id_of(c.src_vocab.token(static_cast<TokenId>(i))) == static_cast<TokenId>(i));
  }
  std::vector<std::string> src2, tgt2;
  for (const auto& p : c.pairs) {
    std::string a, b;
    for (auto id : p.src) a += c.src_vocab.token(id) + " ";
    for (auto id : p.tgt) b += c.tgt_vocab.token(id) + " ";
    src2.push_back(a);
    tgt2.push_back(b);
  }
  const auto again = ingest_parallel(src2, tgt2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(again.pairs[i].src == c.pairs[i].src);
    CHECK(again.pairs[i].tgt == c.pairs[i].tgt);
  }
}

TEST_CASE("corpus directory round trip") {
  testing_util::TempDir dir;
  const auto c = ingest_parallel({"Hola mundo", "", "adiós mundo"}, {"ab cd", "q", "ef cd"});
  write_corpus(c, dir / "corpus");
  const auto back = read_corpus(dir / "corpus");
  CHECK(back.src_vocab.tokens() == c.src_vocab.tokens());
  CHECK(back.src_vocab.counts() == c.src_vocab.counts());
  CHECK(back.tgt_vocab.tokens() == c.tgt_vocab.tokens());
  CHECK(back.dropped_pairs == 1);
  CHECK(back.src_vocab.language().code() == "es");
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.pairs[i].src == c.pairs[i].src);
    CHECK(back.pairs[i].tgt == c.pairs[i].tgt);
  }
  write_corpus(back, dir / "again");
  for (const char* f : {"meta.tsv", "vocab.src.tsv", "vocab.tgt.tsv", "sentences.src.txt", "sentences.tgt.txt"}) {
    CHECK(testing_util::slurp(dir / "corpus" / f) == testing_util::slurp(dir / "again" / f));
  }
}

TEST_CASE("swapped exchanges sides") {
  const auto c = ingest_parallel({"a b"}, {"x"});
  const auto s = swapped(c);
  CHECK(s.src_vocab.language().code() == "na");
  CHECK(s.pairs[0].src == c.pairs[0].tgt);
  CHECK(s.pairs[0].tgt == c.pairs[0].src);
}
