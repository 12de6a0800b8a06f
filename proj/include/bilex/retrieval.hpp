#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bilex/embedding.hpp"
#include "bilex/error.hpp"
#include "bilex/mapping.hpp"

namespace bilex {

struct Neighbor {
  std::string token;
  double distance;
  bool operator==(const Neighbor&) const = default;
};

inline bool has_tag(const std::string& token, const std::string& tag) {
  return token.size() > tag.size() && token.compare(0, tag.size(), tag) == 0 && token[tag.size()] == ':';
}

inline std::string strip_tag(const std::string& token) {
  const auto colon = token.find(':');
  return colon == std::string::npos ? token : token.substr(colon + 1);
}

// Exact L2 search among entries tagged `restrict_tag`; ascending distance,
// ties by token. Returns min(k, pool) results.
template <typename Scalar, typename Derived>
std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix<Scalar>& emb, const Eigen::MatrixBase<Derived>& query,
                                        std::size_t k, const std::string& restrict_tag) {
  if (k < 1) throw ParameterError("nearest_neighbors: k must be >= 1");
  if (query.size() != emb.dim()) throw ParameterError("nearest_neighbors: query dimension mismatch");
  const Eigen::VectorXd q = query.template cast<double>();
  std::vector<Neighbor> pool;
  for (Eigen::Index i = 0; i < emb.size(); ++i) {
    if (!has_tag(emb.token(i), restrict_tag)) continue;
    const double dist = (emb.vectors().row(i).transpose().template cast<double>() - q).norm();
    pool.push_back({emb.token(i), dist});
  }
  if (pool.empty()) throw ParameterError("nearest_neighbors: no entries tagged '" + restrict_tag + "'");
  const std::size_t take = std::min(k, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.distance != b.distance) return a.distance < b.distance;
                      return a.token < b.token;
                    });
  pool.resize(take);
  return pool;
}

// Ranked untagged target candidates, or nullopt when the source token is
// out of vocabulary.
using Translation = std::optional<std::vector<Neighbor>>;

// Neighbors of the source node's own vector among target-tagged entries of
// one shared embedding.
template <typename Scalar>
Translation translate_direct(const std::string& src_token, const EmbeddingMatrix<Scalar>& shared,
                             const std::string& src_tag, const std::string& tgt_tag, std::size_t k) {
  const auto i = shared.index_of(src_tag + ":" + src_token);
  if (!i) return std::nullopt;
  auto out = nearest_neighbors(shared, shared.vectors().row(*i).transpose(), k, tgt_tag);
  for (auto& n : out) n.token = strip_tag(n.token);
  return out;
}

// Neighbors of W x_src among target-tagged entries of `tgt_emb`.
template <typename Scalar, typename MapScalar>
Translation translate_mapped(const std::string& src_token, const EmbeddingMatrix<Scalar>& src_emb,
                             const LinearMap<MapScalar>& map, const EmbeddingMatrix<Scalar>& tgt_emb,
                             const std::string& src_tag, const std::string& tgt_tag, std::size_t k) {
  const auto i = src_emb.index_of(src_tag + ":" + src_token);
  if (!i) return std::nullopt;
  const Vector<MapScalar> projected = apply_map(map, src_emb.vectors().row(*i).transpose());
  auto out = nearest_neighbors(tgt_emb, projected, k, tgt_tag);
  for (auto& n : out) n.token = strip_tag(n.token);
  return out;
}

struct GoldLexicon {
  std::map<std::string, std::set<std::string>> entries;
};

// src<TAB>tgt, several rows per source allowed.
GoldLexicon read_gold(const std::filesystem::path& path);
void write_gold(const GoldLexicon& gold, const std::filesystem::path& path);

struct QueryPrediction {
  std::string source;
  std::optional<std::vector<std::string>> ranked;  // nullopt = out of vocabulary
};

struct QueryOutcome {
  std::string source;
  std::vector<std::string> ranked;
  std::optional<std::size_t> first_hit_rank;  // 1-based
};

struct EvalReport {
  std::map<std::size_t, double> p_at;
  std::vector<QueryOutcome> per_query;
  std::vector<std::string> skipped;
  std::size_t evaluated = 0;
};

// A query hits at k when any gold translation is among its first k
// candidates. OOV queries are misses at every k and are listed in skipped.
EvalReport precision_at_k(const std::vector<QueryPrediction>& predictions, const GoldLexicon& gold,
                          const std::vector<std::size_t>& ks = {1, 5, 10});

struct NamedReport {
  std::string system;
  EvalReport report;
};

// system<TAB>evaluated<TAB>skipped<TAB>p@k columns
void write_report_summary(const std::vector<NamedReport>& reports, const std::filesystem::path& path);
// system<TAB>source<TAB>first_hit_rank|-<TAB>space-joined candidates|<oov>
void write_report_detail(const std::vector<NamedReport>& reports, const std::filesystem::path& path);
// {"system": {"p_at": {"1": .., ...}, "evaluated": .., "skipped": [..]}}
void write_report_json(const std::vector<NamedReport>& reports, const std::filesystem::path& path);

// system<TAB>source<TAB>candidates (space-joined) or <oov>
void write_predictions(const std::vector<std::pair<std::string, std::vector<QueryPrediction>>>& systems,
                       const std::filesystem::path& path);
std::vector<std::pair<std::string, std::vector<QueryPrediction>>> read_predictions(const std::filesystem::path& path);

}  // namespace bilex
