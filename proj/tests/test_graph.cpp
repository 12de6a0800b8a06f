#include <algorithm>
#include <map>
#include <random>
#include <numeric>
#include <set>

#include "bilex/alias.hpp"
#include "bilex/error.hpp"
#include "bilex/graph.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bilex;

namespace {

BilingualGraph make_graph(std::size_t n, const std::vector<WeightedEdge>& edges) {
  std::vector<GraphNode> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({Side::src, static_cast<TokenId>(i), "es:n" + std::to_string(i)});
  return BilingualGraph(std::move(nodes), edges);
}

BilingualGraph random_graph(std::uint64_t seed, std::size_t n, double density) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.05, 3.0);
  std::vector<WeightedEdge> edges;
  for (NodeId a = 0; a < n; ++a) {
    edges.push_back({a, static_cast<NodeId>((a + 1) % n), w(rng)});
    for (NodeId b = a + 2; b < n; ++b)
      if (u(rng) < density) edges.push_back({a, b, w(rng)});
  }
  return make_graph(n, edges);
}

// Cell enumeration: cell i keeps prob[i]/n for itself and passes the rest to alias[i].
std::vector<double> enumerate_cells(std::span<const double> prob, std::span<const std::uint32_t> alias) {
  const double n = static_cast<double>(prob.size());
  std::vector<double> out(prob.size(), 0.0);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    out[i] += prob[i] / n;
    out[alias[i]] += (1.0 - prob[i]) / n;
  }
  return out;
}

Vocabulary vocab(const char* lang, const std::vector<std::string>& words) {
  Vocabulary v{LanguageTag(lang)};
  for (const auto& w : words) v.add(w);
  return v;
}

}  // namespace

TEST_CASE("alias construction on hand examples") {
  const std::vector<double> half = {0.5, 0.5};
  const AliasTable t(half);
  CHECK(t.prob() == std::vector<double>{1.0, 1.0});
  const std::vector<double> w = {1.0, 3.0};
  const AliasTable u(w);
  CHECK(u.prob()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.alias()[0] == 1);
  CHECK(u.prob()[1] == 1.0);
  CHECK_THROWS(AliasTable(std::vector<double>{}));
  CHECK_THROWS(AliasTable(std::vector<double>{1.0, -1.0}));
  CHECK_THROWS(AliasTable(std::vector<double>{0.0, 0.0}));
}

TEST_CASE("alias tables are exact by cell enumeration") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 4;
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = u(rng));
    if (trial % 7 == 0) w[0] = 0.0, total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total == 0.0) continue;
    const AliasTable t(w);
    const auto dist = enumerate_cells(t.prob(), t.alias());
    const auto lib = alias_distribution(t.prob(), t.alias());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(dist[i] == doctest::Approx(w[i] / total).epsilon(1e-12));
      CHECK(lib[i] == doctest::Approx(dist[i]).epsilon(1e-12));
      CHECK(t.prob()[i] >= 0.0);
      CHECK(t.prob()[i] <= 1.0);
    }
  }
}

TEST_CASE("alias draw frequencies over [2,1,1]") {
  const std::vector<double> w = {2.0, 1.0, 1.0};
  const AliasTable t(w);
  Rng rng(1);
  std::vector<double> f(3, 0.0);
  for (int i = 0; i < 100000; ++i) f[t.sample(rng)] += 1e-5;
  const double l1 = std::abs(f[0] - 0.5) + std::abs(f[1] - 0.25) + std::abs(f[2] - 0.25);
  CHECK(l1 < 0.01);
}

TEST_CASE("build_graph direct construction") {
  const auto sv = vocab("es", {"a", "b"});
  const auto tv = vocab("na", {"x", "y"});
  TranslationTable t{LanguageTag("es"), LanguageTag("na"), ScoreKind::association, {{{0, 0.8}, {1, 0.3}}, {}}};
  const auto g = build_graph(t, sv, tv, 2, 0.0);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.node(0).label == "es:a");
  CHECK(g.node(1).label == "na:x");
  CHECK(g.weight(0, 1) == 0.8);
  CHECK(g.weight(1, 0) == 0.8);

  t.rows[1] = {{0, 0.5}};
  const auto h = build_graph(t, sv, tv, 1, 0.0);
  CHECK(h.num_nodes() == 3);
  CHECK(h.degree(2) == 2);  // na:x shared by a and b

  CHECK(build_graph(t, sv, tv, 10, 0.6).num_edges() == 1);
  CHECK_THROWS_AS(build_graph(t, sv, tv, 0, 0.0), ParameterError);
  CHECK_THROWS_AS(build_graph(t, sv, tv, 1, -1.0), ParameterError);
  TranslationTable empty{LanguageTag("es"), LanguageTag("na"), ScoreKind::association, {}};
  CHECK_THROWS_AS(build_graph(empty, sv, tv, 1, 0.0), EmptyInputError);
}

TEST_CASE("build_graph matches a naive set builder on random tables") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> sw, tw;
    for (int i = 0; i < 15; ++i) sw.push_back("s" + std::to_string(i));
    for (int i = 0; i < 12; ++i) tw.push_back("s" + std::to_string(i));  // homographs across languages
    const auto sv = vocab("es", sw), tv = vocab("na", tw);
    TranslationTable t{LanguageTag("es"), LanguageTag("na"), ScoreKind::association, {}};
    t.rows.resize(15);
    for (auto& row : t.rows) {
      for (TokenId j = 0; j < 12; ++j)
        if (u(rng) < 0.3) row.push_back({j, std::max(0.01, std::round(u(rng) * 20) / 20)});
      sort_row(row);
    }
    const std::size_t top_k = 1 + trial % 4;
    const double min_score = (trial % 3) * 0.2;
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, double> edges;
    for (TokenId s = 0; s < 15; ++s) {
      auto row = t.rows[s];
      std::sort(row.begin(), row.end(), [](const Candidate& a, const Candidate& b) {
        return a.score != b.score ? a.score > b.score : a.target < b.target;
      });
      std::size_t taken = 0;
      for (const auto& c : row) {
        if (taken == top_k) break;
        if (c.score < min_score) continue;
        ++taken;
        const std::string a = "es:" + sw[s], b = "na:" + tw[c.target];
        nodes.insert(a);
        nodes.insert(b);
        edges[{a, b}] = std::max(edges[{a, b}], c.score);
      }
    }
    if (edges.empty()) {
      CHECK_THROWS_AS(build_graph(t, sv, tv, top_k, min_score), EmptyInputError);
      continue;
    }
    const auto g = build_graph(t, sv, tv, top_k, min_score);
    CHECK(g.num_nodes() == nodes.size());
    CHECK(g.num_edges() == edges.size());
    std::map<std::string, NodeId> id;
    for (NodeId v = 0; v < g.num_nodes(); ++v) id[g.node(v).label] = v;
    for (const auto& [e, w] : edges) CHECK(g.weight(id.at(e.first), id.at(e.second)) == w);
  }
}

TEST_CASE("graph adjacency is symmetric and rejects bad edges") {
  const auto g = random_graph(4, 30, 0.2);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nb = g.neighbors(u);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    for (std::size_t i = 0; i < nb.size(); ++i) {
      CHECK(nb[i] != u);
      CHECK(g.weights(u)[i] > 0.0);
      CHECK(g.has_edge(nb[i], u));
      CHECK(g.weight(nb[i], u) == g.weights(u)[i]);
    }
  }
  CHECK_THROWS(make_graph(2, {{0, 0, 1.0}}));
  CHECK_THROWS(make_graph(2, {{0, 1, 0.0}}));
  CHECK_THROWS(make_graph(2, {{0, 2, 1.0}}));
  const auto dup = make_graph(2, {{0, 1, 0.5}, {1, 0, 0.9}});
  CHECK(dup.num_edges() == 1);
  CHECK(dup.weight(0, 1) == 0.9);
}

TEST_CASE("per-node alias samplers reproduce neighbor weights") {
  const auto g = random_graph(50, 50, 0.1);
  const auto s = build_alias(g);
  Rng rng(3);
  double worst = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto w = g.weights(v);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const auto dist = enumerate_cells(s.prob(v), s.alias(v));
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(dist[i] == doctest::Approx(w[i] / total).epsilon(1e-12));
    std::vector<double> f(w.size(), 0.0);
    for (int i = 0; i < 20000; ++i) f[s.sample(v, rng())] += 1.0 / 20000;
    double l1 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) l1 += std::abs(f[i] - w[i] / total);
    worst = std::max(worst, l1);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("forced walk on a single edge") {
  const auto g = make_graph(2, {{0, 1, 1.0}});
  const auto s = build_alias(g);
  const auto walks = generate_walks(g, s, {5, 3, 1.0, 1.0}, 7);
  CHECK(walks.walks.size() == 10);
  for (const auto& w : walks.walks) {
    if (w.front() == 0) CHECK(w == std::vector<NodeId>{0, 1, 0});
    else CHECK(w == std::vector<NodeId>{1, 0, 1});
  }
}

TEST_CASE("star center steps are uniform") {
  const auto g = make_graph(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  const auto s = build_alias(g);
  Rng rng(5);
  std::vector<double> f(4, 0.0);
  for (int i = 0; i < 100000; ++i) {
    const NodeId prev = static_cast<NodeId>(1 + i % 3);
    f[walk_step(g, s, prev, 0, false, 1.0, 1.0, rng)] += 1e-5;
  }
  CHECK(f[0] == 0.0);
  CHECK(std::abs(f[1] - 1.0 / 3) + std::abs(f[2] - 1.0 / 3) + std::abs(f[3] - 1.0 / 3) < 0.01);
}

TEST_CASE("second-order steps follow the p, q bias") {
  const auto g = random_graph(9, 12, 0.35);
  const auto s = build_alias(g);
  Rng rng(6);
  for (auto [p, q] : {std::pair{0.5, 2.0}, std::pair{4.0, 0.25}, std::pair{1.0, 3.0}}) {
    for (NodeId cur = 0; cur < 4; ++cur) {
      const NodeId prev = g.neighbors(cur)[0];
      std::vector<double> expect(g.num_nodes(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < g.degree(cur); ++i) {
        const NodeId x = g.neighbors(cur)[i];
        const double bias = x == prev ? 1.0 / p : g.has_edge(x, prev) ? 1.0 : 1.0 / q;
        total += expect[x] = g.weights(cur)[i] * bias;
      }
      std::vector<double> f(g.num_nodes(), 0.0);
      const int draws = 100000;
      for (int i = 0; i < draws; ++i) f[walk_step(g, s, prev, cur, false, p, q, rng)] += 1.0 / draws;
      double l1 = 0.0;
      for (NodeId x = 0; x < g.num_nodes(); ++x) l1 += std::abs(f[x] - expect[x] / total);
      CHECK(l1 < 0.02);
    }
  }
}

TEST_CASE("walk corpus validity, count and determinism") {
  const auto g = random_graph(10, 40, 0.1);
  const auto s = build_alias(g);
  const WalkParams params{5, 20, 0.7, 1.6};
  const auto a = generate_walks(g, s, params, 42);
  CHECK(a.walks.size() == 5 * g.num_nodes());
  std::vector<int> starts(g.num_nodes(), 0);
  for (const auto& w : a.walks) {
    CHECK(w.size() == 20);
    ++starts[w.front()];
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(g.has_edge(w[i - 1], w[i]));
  }
  for (int c : starts) CHECK(c == 5);
  // each pass covers every node once
  for (std::size_t pass = 0; pass < 5; ++pass) {
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) seen.insert(a.walks[pass * g.num_nodes() + i].front());
    CHECK(seen.size() == g.num_nodes());
  }
  CHECK(generate_walks(g, s, params, 42).walks == a.walks);
  CHECK(generate_walks(g, s, params, 42, 3).walks == a.walks);
  CHECK(generate_walks(g, s, params, 43).walks != a.walks);
  CHECK_THROWS_AS(generate_walks(g, s, {0, 20, 1.0, 1.0}, 1), ParameterError);
  CHECK_THROWS_AS(generate_walks(g, s, {1, 1, 1.0, 1.0}, 1), ParameterError);
  CHECK_THROWS_AS(generate_walks(g, s, {1, 5, 0.0, 1.0}, 1), ParameterError);
  CHECK_THROWS_AS(generate_walks(g, s, {1, 5, 1.0, -2.0}, 1), ParameterError);
}

TEST_CASE("edge list round trip and walk export") {
  testing_util::TempDir dir;
  const auto sv = vocab("es", {"a", "b", "c"});
  const auto tv = vocab("na", {"a", "y"});
  TranslationTable t{LanguageTag("es"), LanguageTag("na"), ScoreKind::association,
                     {{{0, 0.75}, {1, 0.25}}, {{1, 1.0}}, {{0, 1.0 / 3.0}}}};
  const auto g = build_graph(t, sv, tv, 10, 0.0);
  write_edges(g, dir / "e.tsv");
  const auto back = read_edges(dir / "e.tsv", sv, tv);
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.num_edges() == g.num_edges());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    CHECK(back.node(v).label == g.node(v).label);
    CHECK(std::equal(back.weights(v).begin(), back.weights(v).end(), g.weights(v).begin()));
  }
  write_edges(back, dir / "f.tsv");
  CHECK(testing_util::slurp(dir / "e.tsv") == testing_util::slurp(dir / "f.tsv"));
  CHECK(testing_util::slurp(dir / "e.tsv").find("es:a\tna:a\t0.75\n") != std::string::npos);

  const auto walks = generate_walks(g, build_alias(g), {1, 3, 1.0, 1.0}, 1);
  write_walks(walks, g, dir / "w.txt");
  const auto text = testing_util::slurp(dir / "w.txt");
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(g.num_nodes()));
}
