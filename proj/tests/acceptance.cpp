// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures. Usage: bilex_acceptance [work_dir]

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "bilex/alias.hpp"
#include "bilex/graph.hpp"
#include "bilex/ibm1.hpp"
#include "bilex/lexicon.hpp"
#include "bilex/mapping.hpp"
#include "bilex/pipeline.hpp"
#include "bilex/retrieval.hpp"
#include "bilex/sgns.hpp"
#include "bilex/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace bilex;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-22s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion; an escaping exception counts as failure.
void criterion(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, name, ok, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::pair<bool, std::string> ibm1_oracle() {
  const auto t0 = Clock::now();
  const auto toy = oracle::toy({{"a b", "x y"}, {"a", "x"}});
  const auto c = oracle::to_corpus(toy);
  const auto ref = oracle::ibm1(toy, 10, false);
  Ibm1Trainer trainer(c, false);
  double worst = 0.0;
  for (std::size_t it = 0; it < 10; ++it) {
    trainer.step();
    for (const auto& [e, row] : ref[it])
      for (const auto& [f, p] : row)
        worst = std::max(worst, std::abs(trainer.prob(*c.tgt_vocab.id_of(f), *c.src_vocab.id_of(e)) - p));
  }
  const double txa = trainer.prob(*c.tgt_vocab.id_of("x"), *c.src_vocab.id_of("a"));
  const double tyb = trainer.prob(*c.tgt_vocab.id_of("y"), *c.src_vocab.id_of("b"));
  const double secs = seconds_since(t0);
  const bool ok = txa > 0.9 && tyb > 0.9 && worst <= 1e-9 && secs < 1.0;
  return {ok, "t(x|a)=" + fmt("%.6f", txa) + " t(y|b)=" + fmt("%.6f", tyb) + " max_dev=" + fmt("%.2e", worst) +
                  " time=" + fmt("%.3fs", secs)};
}

std::pair<bool, std::string> em_monotone() {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = oracle::to_corpus(oracle::random_toy(seed, 40, 8, 9));
    Ibm1Trainer trainer(c, false);
    double prev = trainer.log_likelihood();
    for (int it = 0; it < 10; ++it) {
      trainer.step();
      const double ll = trainer.log_likelihood();
      worst = std::min(worst, ll - prev);
      prev = ll;
    }
  }
  return {worst >= -1e-12, "min step delta=" + fmt("%.3e", worst)};
}

std::pair<bool, std::string> alias_exact() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.05, 1.0);
  // bipartite like the pipeline graph: 25 source nodes with 1-4 weighted targets each
  std::vector<GraphNode> nodes;
  for (TokenId i = 0; i < 25; ++i) nodes.push_back({Side::src, i, "es:s" + std::to_string(i)});
  for (TokenId i = 0; i < 25; ++i) nodes.push_back({Side::tgt, i, "na:t" + std::to_string(i)});
  std::vector<WeightedEdge> edges;
  for (NodeId s = 0; s < 25; ++s) {
    edges.push_back({s, static_cast<NodeId>(25 + s), w(rng)});
    for (int k = 0; k < 3; ++k)
      if (u(rng) < 0.5) edges.push_back({s, static_cast<NodeId>(25 + rng() % 25), w(rng)});
  }
  const BilingualGraph g(nodes, edges);
  const AliasSampler sampler = build_alias(g);
  Rng draw(7);
  double worst = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto ws = g.weights(v);
    double total = 0.0;
    for (double x : ws) total += x;
    std::vector<double> freq(ws.size(), 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) freq[sampler.sample(v, draw())] += 1.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) l1 += std::abs(freq[i] / n - ws[i] / total);
    worst = std::max(worst, l1);
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.01 && secs < 10.0, "max L1=" + fmt("%.5f", worst) + " time=" + fmt("%.2fs", secs)};
}

std::pair<bool, std::string> gradient_check() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 0.7);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + trial % 15, k = 1 + trial % 8;
    Eigen::VectorXd c(d), o(d);
    RowMatrix<double> n(k, d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = gauss(rng), o(i) = gauss(rng);
    for (Eigen::Index i = 0; i < n.size(); ++i) n.data()[i] = gauss(rng);
    const auto g = pair_loss_gradient<double>(c, o, n);
    std::vector<double> a, b;
    auto probe = [&](double& x, double grad) {
      const double keep = x;
      x = keep + h;
      const double up = pair_loss<double>(c, o, n);
      x = keep - h;
      const double down = pair_loss<double>(c, o, n);
      x = keep;
      a.push_back(grad);
      b.push_back((up - down) / (2 * h));
    };
    for (Eigen::Index i = 0; i < d; ++i) probe(c(i), g.center(i));
    for (Eigen::Index i = 0; i < d; ++i) probe(o(i), g.context(i));
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index i = 0; i < d; ++i) probe(n(r, i), g.negatives(r, i));
    const Eigen::Map<Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
    const Eigen::Map<Eigen::VectorXd> vb(b.data(), static_cast<Eigen::Index>(b.size()));
    worst = std::max(worst, (va - vb).norm() / std::max({va.norm(), vb.norm(), 1e-300}));
  }
  return {worst < 1e-4, "max relative error=" + fmt("%.3e", worst) + " over 100 configurations"};
}

std::pair<bool, std::string> softmax_oracle() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 2.0);
  double sum_dev = 0.0, uniform_dev = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 3 + trial, d = 1 + trial % 7;
    std::vector<std::string> vocab;
    for (Eigen::Index i = 0; i < n; ++i) vocab.push_back("v" + std::to_string(i));
    RowMatrix<double> m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
    const auto p = full_softmax(EmbeddingMatrix<double>(vocab, m), trial % n);
    sum_dev = std::max(sum_dev, std::abs(p.sum() - 1.0));
    RowMatrix<double> eq(n, d);
    eq.rowwise() = m.row(0);
    const auto q = full_softmax(EmbeddingMatrix<double>(vocab, eq), trial % n);
    uniform_dev = std::max(uniform_dev, (q.array() - 1.0 / static_cast<double>(n)).abs().maxCoeff());
  }
  return {sum_dev <= 1e-9 && uniform_dev <= 1e-12,
          "max |sum-1|=" + fmt("%.2e", sum_dev) + " max |p-1/|V||=" + fmt("%.2e", uniform_dev)};
}

std::pair<bool, std::string> ridge_map() {
  using Mat = DenseMatrix<double>;
  const auto hand = fit_linear_map<double>(Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 2.0), 1.0);
  const bool exact = hand.matrix.rows() == 1 && hand.matrix.cols() == 1 && hand.matrix(0, 0) == 1.0;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&](Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
  };
  double worst_gap = 0.0;
  int lowered = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const Mat X = rnd(5, 20), Y = rnd(5, 20);
    const double gamma = 0.1;
    const auto closed = fit_linear_map<double>(X, Y, gamma);
    const auto grad = fit_linear_map<double>(X, Y, gamma, FitMethod::gradient);
    worst_gap = std::max(worst_gap, (closed.matrix - grad.matrix).cwiseAbs().maxCoeff());
    const double best = ridge_objective<double>(closed.matrix, X, Y, gamma);
    for (int p = 0; p < 1000; ++p) {
      const double eps = std::pow(10.0, -1.0 - p % 6);
      if (ridge_objective<double>(closed.matrix + eps * rnd(5, 5), X, Y, gamma) < best) ++lowered;
    }
  }
  return {exact && worst_gap <= 1e-3 && lowered == 0,
          std::string("hand W=") + fmt("%.17g", hand.matrix(0, 0)) + " max |closed-gradient|=" +
              fmt("%.2e", worst_gap) + " perturbations lowering objective=" + std::to_string(lowered)};
}

std::pair<bool, std::string> precision_oracle() {
  std::mt19937_64 rng(7);
  int mismatches = 0, non_monotone = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GoldLexicon gold;
    std::vector<std::pair<std::string, std::vector<std::string>>> gold_list, pred_list;
    std::vector<QueryPrediction> preds;
    std::set<std::string> oov;
    const int queries = 1 + static_cast<int>(rng() % 40);
    for (int q = 0; q < queries; ++q) {
      const std::string src = "s" + std::to_string(q);
      std::vector<std::string> gs;
      for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k) gs.push_back("t" + std::to_string(rng() % 20));
      gold.entries[src] = std::set<std::string>(gs.begin(), gs.end());
      gold_list.emplace_back(src, gs);
      std::vector<std::string> ranked;
      for (int k = 0, n = static_cast<int>(rng() % 13); k < n; ++k) ranked.push_back("t" + std::to_string(rng() % 20));
      if (rng() % 8 == 0) {
        oov.insert(src);
        preds.push_back({src, std::nullopt});
      } else {
        preds.push_back({src, ranked});
      }
      pred_list.emplace_back(src, ranked);
    }
    const auto r = precision_at_k(preds, gold);
    for (std::size_t k : {1u, 5u, 10u})
      if (r.p_at.at(k) != oracle::precision_scan(pred_list, gold_list, k, oov)) ++mismatches;
    if (!(r.p_at.at(1) <= r.p_at.at(5) && r.p_at.at(5) <= r.p_at.at(10))) ++non_monotone;
  }
  return {mismatches == 0 && non_monotone == 0,
          "mismatches=" + std::to_string(mismatches) + " non-monotone=" + std::to_string(non_monotone)};
}

PipelineConfig synthetic_config(const fs::path& data, const fs::path& work) {
  PipelineConfig c;
  c.src_path = (data / "src.txt").string();
  c.tgt_path = (data / "tgt.txt").string();
  c.gold_path = (data / "gold.tsv").string();
  c.work_dir = work.string();
  return c;
}

std::map<std::string, EvalReport> read_reports(const PipelineConfig& c) {
  const GoldLexicon eval = read_gold(c.artifact("eval_gold"));
  std::map<std::string, EvalReport> out;
  for (const auto& [system, preds] : read_predictions(c.artifact("predictions"))) out[system] = precision_at_k(preds, eval);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "bilex-acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  set_log_enabled(false);

  criterion(1, "ibm1-oracle", ibm1_oracle);
  criterion(2, "em-monotonicity", em_monotone);
  criterion(3, "alias-exactness", alias_exact);
  criterion(4, "sgns-gradient-check", gradient_check);
  criterion(5, "softmax-oracle", softmax_oracle);
  criterion(6, "ridge-map", ridge_map);
  criterion(7, "precision-at-k-oracle", precision_oracle);

  const auto syn = generate_synthetic(200, 2000, 7);
  write_synthetic(syn, root / "synthetic");
  const PipelineConfig first = synthetic_config(root / "synthetic", root / "run1");
  bool first_ok = false;
  criterion(8, "synthetic-ordering", [&] {
    const auto t0 = Clock::now();
    run_pipeline(first);
    const double secs = seconds_since(t0);
    first_ok = true;
    auto r = read_reports(first);
    const auto& map = r.at("n2v-map");
    const auto& nomap = r.at("n2v-nomap");
    const auto& w2v = r.at("w2v-map");
    bool ordered = true;
    std::string detail;
    for (std::size_t k : {1u, 5u, 10u}) {
      ordered = ordered && map.p_at.at(k) >= nomap.p_at.at(k) && nomap.p_at.at(k) > w2v.p_at.at(k);
      detail += "P@" + std::to_string(k) + " " + fmt("%.3f", map.p_at.at(k)) + "/" + fmt("%.3f", nomap.p_at.at(k)) +
                "/" + fmt("%.3f", w2v.p_at.at(k)) + " ";
    }
    // held-out words must not appear in the seed lexicon
    const auto lex = read_lexicon(first.artifact("seed_lexicon"));
    const auto eval = read_gold(first.artifact("eval_gold"));
    bool excluded = eval.entries.size() == 30;
    for (const auto& e : lex.entries) excluded = excluded && !eval.entries.count(e.src);
    const bool ok = map.p_at.at(1) >= 0.8 && ordered && excluded && secs < 300.0;
    return std::make_pair(ok, "(map/nomap/w2v) " + detail + "held-out=" + std::to_string(eval.entries.size()) +
                                  (excluded ? " excluded" : " LEAKED") + " time=" + fmt("%.1fs", secs));
  });

  criterion(9, "determinism", [&] {
    if (!first_ok) return std::make_pair(false, std::string("first run did not complete"));
    const PipelineConfig second = synthetic_config(root / "synthetic", root / "run2");
    run_pipeline(second);
    std::vector<std::string> differ;
    for (const char* a : {"emb_n2v", "emb_w2v_src", "emb_w2v_tgt", "report", "report_detail", "report_json"}) {
      if (testing_util::slurp(first.artifact(a)) != testing_util::slurp(second.artifact(a))) differ.push_back(a);
    }
    std::string detail = differ.empty() ? "embeddings and reports byte-identical" : "differ:";
    for (const auto& d : differ) detail += " " + d;
    return std::make_pair(differ.empty(), detail);
  });

  criterion(10, "format-round-trips", [&] {
    if (!first_ok) return std::make_pair(false, std::string("pipeline artifacts missing"));
    const fs::path out = root / "roundtrip";
    fs::create_directories(out);
    std::vector<std::string> bad;
    auto same = [&](const fs::path& a, const fs::path& b, const std::string& what) {
      if (testing_util::slurp(a) != testing_util::slurp(b)) bad.push_back(what);
    };
    // embeddings, in the float precision the pipeline uses and in double
    for (const char* a : {"emb_n2v", "emb_w2v_src"}) {
      const auto e = read_embeddings<float>(first.artifact(a));
      write_embeddings(e, out / (std::string(a) + ".1"));
      write_embeddings(read_embeddings<float>(out / (std::string(a) + ".1")), out / (std::string(a) + ".2"));
      same(out / (std::string(a) + ".1"), out / (std::string(a) + ".2"), a);
      same(first.artifact(a), out / (std::string(a) + ".1"), std::string(a) + "(pipeline)");
      write_embeddings(read_embeddings<double>(first.artifact(a)), out / (std::string(a) + ".d1"));
      write_embeddings(read_embeddings<double>(out / (std::string(a) + ".d1")), out / (std::string(a) + ".d2"));
      same(out / (std::string(a) + ".d1"), out / (std::string(a) + ".d2"), std::string(a) + "(double)");
    }
    const auto corpus = read_corpus(first.artifact("corpus"));
    for (const char* a : {"ibm1_fwd", "sampling_fwd"}) {
      const auto t = read_table(first.artifact(a), corpus.src_vocab, corpus.tgt_vocab);
      write_table(t, corpus.src_vocab, corpus.tgt_vocab, out / (std::string(a) + ".1"));
      write_table(read_table(out / (std::string(a) + ".1"), corpus.src_vocab, corpus.tgt_vocab), corpus.src_vocab,
                  corpus.tgt_vocab, out / (std::string(a) + ".2"));
      same(out / (std::string(a) + ".1"), out / (std::string(a) + ".2"), a);
    }
    for (const char* a : {"ibm1_rev", "sampling_rev"}) {
      const auto t = read_table(first.artifact(a), corpus.tgt_vocab, corpus.src_vocab);
      write_table(t, corpus.tgt_vocab, corpus.src_vocab, out / (std::string(a) + ".1"));
      write_table(read_table(out / (std::string(a) + ".1"), corpus.tgt_vocab, corpus.src_vocab), corpus.tgt_vocab,
                  corpus.src_vocab, out / (std::string(a) + ".2"));
      same(out / (std::string(a) + ".1"), out / (std::string(a) + ".2"), a);
    }
    write_lexicon(read_lexicon(first.artifact("seed_lexicon")), out / "lex.1");
    write_lexicon(read_lexicon(out / "lex.1"), out / "lex.2");
    same(out / "lex.1", out / "lex.2", "seed_lexicon");
    for (const char* a : {"map_n2v", "map_w2v"}) {
      write_map(read_map<double>(first.artifact(a)), out / (std::string(a) + ".1"));
      write_map(read_map<double>(out / (std::string(a) + ".1")), out / (std::string(a) + ".2"));
      same(out / (std::string(a) + ".1"), out / (std::string(a) + ".2"), a);
    }
    std::string detail = bad.empty() ? "embeddings, tables, lexicon and maps stable" : "unstable:";
    for (const auto& b : bad) detail += " " + b;
    return std::make_pair(bad.empty(), detail);
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
