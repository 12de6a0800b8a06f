#include "bilex/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "bilex/alias.hpp"
#include "bilex/error.hpp"
#include "bilex/rng.hpp"
#include "bilex/util.hpp"

namespace bilex {

namespace {
std::string word(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%04zu", prefix, i);
  return buf;
}
}  // namespace

SyntheticCorpus generate_synthetic(std::size_t vocab_size, std::size_t sentences, std::uint64_t seed) {
  if (vocab_size < 20) throw ParameterError("generate_synthetic: vocab_size must be >= 20");
  if (sentences < 50) throw ParameterError("generate_synthetic: sentences must be >= 50");

  Rng rng(derive_seed(seed, "synthetic"));
  std::vector<std::size_t> image(vocab_size);
  std::iota(image.begin(), image.end(), std::size_t{0});
  for (std::size_t i = vocab_size; i > 1; --i) std::swap(image[i - 1], image[uniform_index(rng, i)]);

  SyntheticCorpus out;
  for (std::size_t i = 0; i < vocab_size; ++i) out.gold.entries[word('s', i)].insert(word('t', image[i]));

  std::vector<double> zipf(vocab_size);
  for (std::size_t r = 0; r < vocab_size; ++r) zipf[r] = 1.0 / static_cast<double>(r + 1);
  const AliasTable unigram(zipf);

  std::set<std::size_t> used;
  for (std::size_t n = 0; n < sentences; ++n) {
    const std::size_t len = 3 + uniform_index(rng, 6);
    std::vector<std::size_t> src(len);
    for (auto& w : src) {
      w = unigram.sample(rng);
      used.insert(w);
    }
    // local shuffle: sort positions by i + U[0, 2)
    std::vector<std::pair<double, std::size_t>> keyed(len);
    for (std::size_t i = 0; i < len; ++i) keyed[i] = {static_cast<double>(i) + 2.0 * uniform01(rng), src[i]};
    std::sort(keyed.begin(), keyed.end());

    std::string s, t;
    for (std::size_t i = 0; i < len; ++i) {
      s += (i ? " " : "") + word('s', src[i]);
      t += (i ? " " : "") + word('t', image[keyed[i].second]);
    }
    out.src_lines.push_back(std::move(s));
    out.tgt_lines.push_back(std::move(t));
    out.tokens += len;
  }
  out.src_types = out.tgt_types = used.size();
  return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "src.txt", [&](std::ostream& out) {
    for (const auto& l : corpus.src_lines) out << l << '\n';
  });
  write_file_atomic(dir / "tgt.txt", [&](std::ostream& out) {
    for (const auto& l : corpus.tgt_lines) out << l << '\n';
  });
  write_gold(corpus.gold, dir / "gold.tsv");
}

}  // namespace bilex
