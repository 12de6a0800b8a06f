#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bilex/alias.hpp"
#include "bilex/corpus.hpp"
#include "bilex/rng.hpp"
#include "bilex/translation_table.hpp"

namespace bilex {

using NodeId = std::uint32_t;

enum class Side : std::uint8_t { src = 0, tgt = 1 };

struct GraphNode {
  Side side = Side::src;
  TokenId token = 0;
  std::string label;  // "lang:token"
};

std::string tagged(const LanguageTag& lang, std::string_view token);

struct WeightedEdge {
  NodeId u;
  NodeId v;
  double weight;
};

// Weighted undirected graph in CSR form; every edge is stored in both
// endpoint lists and neighbor lists are sorted by id.
class BilingualGraph {
 public:
  BilingualGraph() = default;
  // Duplicate edges keep the maximum weight. Self-loops and non-positive
  // weights are rejected.
  BilingualGraph(std::vector<GraphNode> nodes, const std::vector<WeightedEdge>& edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return neighbors_.size() / 2; }
  const GraphNode& node(NodeId v) const { return nodes_[v]; }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }
  std::span<const double> weights(NodeId v) const { return {weights_.data() + offsets_[v], degree(v)}; }
  std::size_t offset(NodeId v) const { return offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;
  // 0 when absent
  double weight(NodeId u, NodeId v) const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
};

// Each source word contributes edges to its top_k candidates scoring at
// least min_score. Nodes are ordered source words by id, then target words
// by id; words without edges are omitted.
BilingualGraph build_graph(const TranslationTable& table, const Vocabulary& from_vocab,
                           const Vocabulary& to_vocab, std::size_t top_k, double min_score);

// Per-node alias tables laid out along the graph's CSR offsets.
class AliasSampler {
 public:
  AliasSampler() = default;
  explicit AliasSampler(const BilingualGraph& graph);

  // Index into graph.neighbors(v) of the drawn neighbor.
  std::uint32_t sample(NodeId v, std::uint64_t bits) const;
  std::span<const double> prob(NodeId v) const { return {prob_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]}; }
  std::span<const std::uint32_t> alias(NodeId v) const {
    return {alias_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

AliasSampler build_alias(const BilingualGraph& graph);

struct WalkParams {
  std::size_t num_walks = 5;
  std::size_t walk_length = 80;
  double p = 1.0;
  double q = 1.0;
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  WalkParams params;
};

// num_walks passes over all nodes; each pass visits start nodes in an order
// shuffled from (seed, pass), and walk (pass, v) uses its own generator from
// (seed, pass, v). Output is pass-major in visiting order, independent of
// the thread count.
WalkCorpus generate_walks(const BilingualGraph& graph, const AliasSampler& sampler,
                          const WalkParams& params, std::uint64_t seed, std::size_t threads = 1);

// Next node after `cur` given the previous node (or cur itself for the first
// step), using second-order (p, q) bias by rejection over first-order draws.
NodeId walk_step(const BilingualGraph& graph, const AliasSampler& sampler, NodeId prev, NodeId cur,
                 bool first_step, double p, double q, Rng& rng);

// tagged_src<TAB>tagged_tgt<TAB>weight, one line per undirected edge.
void write_edges(const BilingualGraph& graph, const std::filesystem::path& path);
BilingualGraph read_edges(const std::filesystem::path& path, const Vocabulary& src_vocab,
                          const Vocabulary& tgt_vocab);

void write_walks(const WalkCorpus& walks, const BilingualGraph& graph, const std::filesystem::path& path);

}  // namespace bilex
