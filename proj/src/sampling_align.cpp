#include "bilex/sampling_align.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <thread>

#include "bilex/error.hpp"

namespace bilex {

namespace {

constexpr std::size_t kBlockSize = 256;

// Cumulative 1/k weights, cached per corpus size.
const std::vector<double>& size_cdf(std::size_t n) {
  thread_local std::size_t cached_n = 0;
  thread_local std::vector<double> cdf;
  if (cached_n != n) {
    cdf.resize(n);
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      acc += 1.0 / static_cast<double>(k);
      cdf[k - 1] = acc;
    }
    cached_n = n;
  }
  return cdf;
}

struct ProfileHash {
  std::size_t operator()(const std::vector<std::uint32_t>* v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : *v) h = (h ^ x) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h ^ v->size());
  }
};

struct ProfileEq {
  bool operator()(const std::vector<std::uint32_t>* a, const std::vector<std::uint32_t>* b) const {
    return *a == *b;
  }
};

// Reusable per-thread buffers for profile construction.
struct ProfileScratch {
  std::vector<std::vector<std::uint32_t>> src_profiles;
  std::vector<std::vector<std::uint32_t>> tgt_profiles;
  std::vector<TokenId> src_touched;
  std::vector<TokenId> tgt_touched;
};

void collect(const Sentence& sentence, std::uint32_t local, std::vector<std::vector<std::uint32_t>>& profiles,
             std::vector<TokenId>& touched) {
  for (TokenId w : sentence) {
    auto& prof = profiles[w];
    if (prof.empty()) touched.push_back(w);
    if (prof.empty() || prof.back() != local) prof.push_back(local);
  }
}

std::vector<AlignedGroup> group_profiles(const ParallelCorpus& corpus,
                                         std::span<const std::size_t> indices, ProfileScratch& scratch) {
  scratch.src_profiles.resize(corpus.src_vocab.size());
  scratch.tgt_profiles.resize(corpus.tgt_vocab.size());
  scratch.src_touched.clear();
  scratch.tgt_touched.clear();
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto& pair = corpus.pairs.at(indices[j]);
    collect(pair.src, static_cast<std::uint32_t>(j), scratch.src_profiles, scratch.src_touched);
    collect(pair.tgt, static_cast<std::uint32_t>(j), scratch.tgt_profiles, scratch.tgt_touched);
  }
  std::sort(scratch.src_touched.begin(), scratch.src_touched.end());
  std::sort(scratch.tgt_touched.begin(), scratch.tgt_touched.end());

  std::unordered_map<const std::vector<std::uint32_t>*, std::size_t, ProfileHash, ProfileEq> by_profile;
  by_profile.reserve(scratch.src_touched.size());
  std::vector<AlignedGroup> groups;
  for (TokenId s : scratch.src_touched) {
    auto [it, inserted] = by_profile.emplace(&scratch.src_profiles[s], groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].src.push_back(s);
  }
  for (TokenId t : scratch.tgt_touched) {
    if (auto it = by_profile.find(&scratch.tgt_profiles[t]); it != by_profile.end()) {
      groups[it->second].tgt.push_back(t);
    }
  }
  for (TokenId s : scratch.src_touched) scratch.src_profiles[s].clear();
  for (TokenId t : scratch.tgt_touched) scratch.tgt_profiles[t].clear();

  // groups were created in ascending order of their smallest source id
  std::erase_if(groups, [](const AlignedGroup& g) { return g.tgt.empty(); });
  return groups;
}

}  // namespace

std::vector<std::size_t> sample_subcorpus(const ParallelCorpus& corpus, Rng& rng) {
  const std::size_t n = corpus.size();
  if (n == 0) throw EmptyInputError("cannot sample from an empty corpus");
  const auto& cdf = size_cdf(n);
  const double u = uniform01(rng) * cdf.back();
  const std::size_t k =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1);

  // Floyd's algorithm: k distinct values out of [0, n).
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::vector<bool> taken(n, false);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = uniform_index(rng, j + 1);
    const std::size_t pick = taken[t] ? j : t;
    taken[pick] = true;
    chosen.push_back(pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<AlignedGroup> perfect_alignments(const ParallelCorpus& corpus,
                                             std::span<const std::size_t> indices) {
  ProfileScratch scratch;
  return group_profiles(corpus, indices, scratch);
}

void SamplingAccumulator::add(const AlignedGroup& group) {
  const double ns = static_cast<double>(group.src.size());
  const double nt = static_cast<double>(group.tgt.size());
  const double pair_mass = 1.0 / (ns * nt);
  for (TokenId s : group.src) {
    src_counts[s] += 1.0 / ns;
    for (TokenId t : group.tgt) pair_counts[key(s, t)] += pair_mass;
  }
  for (TokenId t : group.tgt) tgt_counts[t] += 1.0 / nt;
}

void SamplingAccumulator::merge(const SamplingAccumulator& other) {
  // iterate in key order so the merge is independent of hash layout
  std::vector<std::pair<std::uint64_t, double>> items(other.pair_counts.begin(), other.pair_counts.end());
  std::sort(items.begin(), items.end());
  for (const auto& [k, v] : items) pair_counts[k] += v;
  for (std::size_t i = 0; i < other.src_counts.size(); ++i) src_counts[i] += other.src_counts[i];
  for (std::size_t i = 0; i < other.tgt_counts.size(); ++i) tgt_counts[i] += other.tgt_counts[i];
  samples_run += other.samples_run;
}

SamplingAccumulator accumulate_samples(const ParallelCorpus& corpus, const SamplingOptions& options) {
  if (options.num_samples == 0) throw ParameterError("num_samples must be >= 1");
  if (corpus.empty()) throw EmptyInputError("sampling alignment needs a non-empty corpus");

  auto fresh = [&] {
    SamplingAccumulator acc;
    acc.src_counts.assign(corpus.src_vocab.size(), 0.0);
    acc.tgt_counts.assign(corpus.tgt_vocab.size(), 0.0);
    return acc;
  };
  SamplingAccumulator total = fresh();

  const std::size_t num_blocks = (options.num_samples + kBlockSize - 1) / kBlockSize;
  const auto start = std::chrono::steady_clock::now();
  std::atomic<bool> out_of_time{false};
  auto expired = [&] {
    if (options.time_budget_seconds <= 0.0) return false;
    if (out_of_time) return true;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    if (elapsed.count() >= options.time_budget_seconds) out_of_time = true;
    return out_of_time.load();
  };

  auto run_block = [&](std::size_t block, ProfileScratch& scratch) {
    SamplingAccumulator acc = fresh();
    const std::size_t first = block * kBlockSize;
    const std::size_t last = std::min(options.num_samples, first + kBlockSize);
    for (std::size_t i = first; i < last; ++i) {
      if (expired()) break;
      Rng rng(derive_seed(options.seed, i));
      const auto indices = sample_subcorpus(corpus, rng);
      for (const auto& g : group_profiles(corpus, indices, scratch)) acc.add(g);
      ++acc.samples_run;
    }
    return acc;
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, num_blocks));
  if (threads == 1) {
    ProfileScratch scratch;
    for (std::size_t b = 0; b < num_blocks; ++b) total.merge(run_block(b, scratch));
    return total;
  }

  std::mutex mutex;
  std::map<std::size_t, SamplingAccumulator> pending;
  std::size_t next_merge = 0;
  std::atomic<std::size_t> next_block{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      ProfileScratch scratch;
      while (true) {
        const std::size_t b = next_block.fetch_add(1);
        if (b >= num_blocks) break;
        SamplingAccumulator acc = run_block(b, scratch);
        std::lock_guard<std::mutex> lock(mutex);
        pending.emplace(b, std::move(acc));
        while (!pending.empty() && pending.begin()->first == next_merge) {
          total.merge(pending.begin()->second);
          pending.erase(pending.begin());
          ++next_merge;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  return total;
}

TranslationTable association_table(const SamplingAccumulator& acc, const ParallelCorpus& corpus,
                                   bool reverse) {
  TranslationTable table;
  table.from = reverse ? corpus.tgt_vocab.language() : corpus.src_vocab.language();
  table.to = reverse ? corpus.src_vocab.language() : corpus.tgt_vocab.language();
  table.score_kind = ScoreKind::association;
  table.rows.resize(reverse ? corpus.tgt_vocab.size() : corpus.src_vocab.size());
  for (const auto& [k, count] : acc.pair_counts) {
    const auto s = static_cast<TokenId>(k >> 32);
    const auto t = static_cast<TokenId>(k & 0xffffffffu);
    if (reverse) {
      table.rows[t].push_back({s, std::min(1.0, count / acc.tgt_counts[t])});
    } else {
      table.rows[s].push_back({t, std::min(1.0, count / acc.src_counts[s])});
    }
  }
  for (auto& row : table.rows) sort_row(row);
  return table;
}

TranslationTable run_sampling_alignment(const ParallelCorpus& corpus, const SamplingOptions& options) {
  return association_table(accumulate_samples(corpus, options), corpus);
}

}  // namespace bilex
