#include "bilex/graph.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <thread>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

std::string tagged(const LanguageTag& lang, std::string_view token) {
  std::string out = lang.code();
  out += ':';
  out += token;
  return out;
}

BilingualGraph::BilingualGraph(std::vector<GraphNode> nodes, const std::vector<WeightedEdge>& edges)
    : nodes_(std::move(nodes)) {
  std::map<std::pair<NodeId, NodeId>, double> unique;
  for (const auto& e : edges) {
    if (e.u >= nodes_.size() || e.v >= nodes_.size()) throw ParameterError("edge endpoint out of range");
    if (e.u == e.v) throw ParameterError("self-loop on node " + nodes_[e.u].label);
    if (!(e.weight > 0.0)) throw ParameterError("edge weights must be strictly positive");
    auto& w = unique[{std::min(e.u, e.v), std::max(e.u, e.v)}];
    w = std::max(w, e.weight);
  }
  std::vector<std::size_t> degree(nodes_.size(), 0);
  for (const auto& [k, w] : unique) {
    ++degree[k.first];
    ++degree[k.second];
  }
  offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t v = 0; v < nodes_.size(); ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  neighbors_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [k, w] : unique) {
    neighbors_[fill[k.first]] = k.second;
    weights_[fill[k.first]++] = w;
  }
  for (const auto& [k, w] : unique) {
    neighbors_[fill[k.second]] = k.first;
    weights_[fill[k.second]++] = w;
  }
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    std::vector<std::size_t> order(degree[v]);
    std::iota(order.begin(), order.end(), offsets_[v]);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return neighbors_[a] < neighbors_[b]; });
    std::vector<NodeId> n;
    std::vector<double> w;
    for (auto i : order) {
      n.push_back(neighbors_[i]);
      w.push_back(weights_[i]);
    }
    std::copy(n.begin(), n.end(), neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]));
    std::copy(w.begin(), w.end(), weights_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]));
  }
}

bool BilingualGraph::has_edge(NodeId u, NodeId v) const {
  const auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), v);
}

double BilingualGraph::weight(NodeId u, NodeId v) const {
  const auto n = neighbors(u);
  const auto it = std::lower_bound(n.begin(), n.end(), v);
  if (it == n.end() || *it != v) return 0.0;
  return weights(u)[static_cast<std::size_t>(it - n.begin())];
}

namespace {

BilingualGraph assemble(const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
                        const std::vector<std::tuple<TokenId, TokenId, double>>& raw) {
  std::vector<char> src_used(src_vocab.size(), 0), tgt_used(tgt_vocab.size(), 0);
  for (const auto& [s, t, w] : raw) {
    src_used[s] = 1;
    tgt_used[t] = 1;
  }
  std::vector<GraphNode> nodes;
  std::vector<NodeId> src_node(src_vocab.size()), tgt_node(tgt_vocab.size());
  for (TokenId s = 0; s < src_vocab.size(); ++s) {
    if (!src_used[s]) continue;
    src_node[s] = static_cast<NodeId>(nodes.size());
    nodes.push_back({Side::src, s, tagged(src_vocab.language(), src_vocab.token(s))});
  }
  for (TokenId t = 0; t < tgt_vocab.size(); ++t) {
    if (!tgt_used[t]) continue;
    tgt_node[t] = static_cast<NodeId>(nodes.size());
    nodes.push_back({Side::tgt, t, tagged(tgt_vocab.language(), tgt_vocab.token(t))});
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(raw.size());
  for (const auto& [s, t, w] : raw) edges.push_back({src_node[s], tgt_node[t], w});
  return BilingualGraph(std::move(nodes), edges);
}

}  // namespace

BilingualGraph build_graph(const TranslationTable& table, const Vocabulary& from_vocab,
                           const Vocabulary& to_vocab, std::size_t top_k, double min_score) {
  if (top_k == 0) throw ParameterError("top_k must be >= 1");
  if (min_score < 0.0) throw ParameterError("min_score must be >= 0");
  if (table.from != from_vocab.language() || table.to != to_vocab.language()) {
    throw ParameterError("table direction does not match vocabularies");
  }
  std::vector<std::tuple<TokenId, TokenId, double>> raw;
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    std::size_t taken = 0;
    for (const auto& c : table.rows[s]) {
      if (taken == top_k) break;
      if (c.score < min_score || !(c.score > 0.0)) continue;
      raw.emplace_back(static_cast<TokenId>(s), c.target, c.score);
      ++taken;
    }
  }
  if (raw.empty()) throw EmptyInputError("translation table yields no edges; graph would be empty");
  return assemble(from_vocab, to_vocab, raw);
}

AliasSampler::AliasSampler(const BilingualGraph& graph) {
  offsets_.assign(graph.num_nodes() + 1, 0);
  for (NodeId v = 0; v < graph.num_nodes(); ++v) offsets_[v + 1] = offsets_[v] + graph.degree(v);
  prob_.resize(offsets_.back());
  alias_.resize(offsets_.back());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    const std::size_t d = graph.degree(v);
    if (d == 0) continue;
    build_alias_cells(graph.weights(v), std::span<double>(prob_.data() + offsets_[v], d),
                      std::span<std::uint32_t>(alias_.data() + offsets_[v], d));
  }
}

std::uint32_t AliasSampler::sample(NodeId v, std::uint64_t bits) const {
  const std::size_t base = offsets_[v];
  const auto n = static_cast<std::uint64_t>(offsets_[v + 1] - base);
  const auto cell = static_cast<std::uint32_t>(((bits >> 32) * n) >> 32);
  const double coin = static_cast<double>(bits & 0xffffffffu) * 0x1.0p-32;
  return coin < prob_[base + cell] ? cell : alias_[base + cell];
}

AliasSampler build_alias(const BilingualGraph& graph) { return AliasSampler(graph); }

NodeId walk_step(const BilingualGraph& graph, const AliasSampler& sampler, NodeId prev, NodeId cur,
                 bool first_step, double p, double q, Rng& rng) {
  const auto nbrs = graph.neighbors(cur);
  if (first_step || (p == 1.0 && q == 1.0)) return nbrs[sampler.sample(cur, rng())];
  const double back = 1.0 / p, out = 1.0 / q;
  const double upper = std::max({back, 1.0, out});
  while (true) {
    const NodeId x = nbrs[sampler.sample(cur, rng())];
    const double bias = x == prev ? back : (graph.has_edge(prev, x) ? 1.0 : out);
    if (uniform01(rng) * upper < bias) return x;
  }
}

WalkCorpus generate_walks(const BilingualGraph& graph, const AliasSampler& sampler,
                          const WalkParams& params, std::uint64_t seed, std::size_t threads) {
  if (params.num_walks < 1) throw ParameterError("num_walks must be >= 1");
  if (params.walk_length < 2) throw ParameterError("walk_length must be >= 2");
  if (!(params.p > 0.0) || !(params.q > 0.0)) throw ParameterError("p and q must be > 0");

  const std::size_t n = graph.num_nodes();
  WalkCorpus corpus;
  corpus.params = params;
  corpus.walks.resize(params.num_walks * n);

  // slot -> (pass, start node)
  std::vector<NodeId> starts(corpus.walks.size());
  for (std::size_t pass = 0; pass < params.num_walks; ++pass) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    Rng shuffle_rng(derive_seed(seed, "walk-order", pass));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);
    std::copy(order.begin(), order.end(), starts.begin() + static_cast<std::ptrdiff_t>(pass * n));
  }

  auto walk_one = [&](std::size_t slot) {
    const std::size_t pass = slot / n;
    const NodeId start = starts[slot];
    Rng rng(derive_seed(seed, pass, start));
    auto& walk = corpus.walks[slot];
    walk.reserve(params.walk_length);
    walk.push_back(start);
    while (walk.size() < params.walk_length) {
      const NodeId cur = walk.back();
      if (graph.degree(cur) == 0) break;
      const NodeId prev = walk.size() >= 2 ? walk[walk.size() - 2] : cur;
      walk.push_back(walk_step(graph, sampler, prev, cur, walk.size() == 1, params.p, params.q, rng));
    }
  };

  threads = std::max<std::size_t>(1, threads);
  if (threads == 1) {
    for (std::size_t s = 0; s < corpus.walks.size(); ++s) walk_one(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t s = next++; s < corpus.walks.size(); s = next++) walk_one(s);
      });
    }
    for (auto& w : workers) w.join();
  }
  return corpus;
}

void write_edges(const BilingualGraph& graph, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (NodeId u = 0; u < graph.num_nodes(); ++u) {
      const auto nbrs = graph.neighbors(u);
      const auto w = graph.weights(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (nbrs[i] <= u) continue;
        out << graph.node(u).label << '\t' << graph.node(nbrs[i]).label << '\t' << format_double(w[i]) << '\n';
      }
    }
  });
}

namespace {
TokenId resolve(const std::string& label, const Vocabulary& vocab, const std::string& where) {
  const std::string prefix = vocab.language().code() + ":";
  if (label.rfind(prefix, 0) != 0) throw FormatError(where + ": expected '" + prefix + "' prefix on " + label);
  const auto id = vocab.id_of(std::string_view(label).substr(prefix.size()));
  if (!id) throw FormatError(where + ": unknown token " + label);
  return *id;
}
}  // namespace

BilingualGraph read_edges(const std::filesystem::path& path, const Vocabulary& src_vocab,
                          const Vocabulary& tgt_vocab) {
  std::vector<std::tuple<TokenId, TokenId, double>> raw;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cols = split(lines[i], '\t');
    const std::string where = path.string() + " line " + std::to_string(i + 1);
    if (cols.size() != 3) throw FormatError(where + ": expected 3 columns");
    raw.emplace_back(resolve(cols[0], src_vocab, where), resolve(cols[1], tgt_vocab, where),
                     parse_double(cols[2], "edge weight"));
  }
  if (raw.empty()) throw EmptyInputError(path.string() + ": no edges");
  return assemble(src_vocab, tgt_vocab, raw);
}

void write_walks(const WalkCorpus& walks, const BilingualGraph& graph, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& w : walks.walks) {
      for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << graph.node(w[i]).label;
      out << '\n';
    }
  });
}

}  // namespace bilex
