#include "bilex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "bilex/corpus.hpp"
#include "bilex/graph.hpp"
#include "bilex/ibm1.hpp"
#include "bilex/lexicon.hpp"
#include "bilex/mapping.hpp"
#include "bilex/plot.hpp"
#include "bilex/retrieval.hpp"
#include "bilex/sampling_align.hpp"
#include "bilex/sgns.hpp"
#include "bilex/util.hpp"

namespace bilex {

namespace fs = std::filesystem;

namespace {

using Embedding = EmbeddingMatrix<float>;

struct Stage {
  std::string name;
  std::function<std::vector<fs::path>(const PipelineConfig&)> inputs;
  std::function<std::vector<fs::path>(const PipelineConfig&)> outputs;
  std::function<void(const PipelineConfig&, const std::string&)> run;
};

fs::path corpus_marker(const PipelineConfig& c) { return c.artifact("corpus") / "meta.tsv"; }

std::vector<std::string> corpus_vocab_labels(const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(vocab.size());
  for (const auto& t : vocab.tokens()) out.push_back(tagged(vocab.language(), t));
  return out;
}

Sequences side_sequences(const ParallelCorpus& corpus, bool src) {
  Sequences out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs) out.push_back(src ? p.src : p.tgt);
  return out;
}

TrainConfig stage_train_config(TrainConfig base, const PipelineConfig& config, std::uint64_t seed) {
  base.seed = seed;
  base.threads = config.threads;
  return base;
}

// Gold sources with corpus frequency >= min_freq, seeded shuffle, first `size`.
GoldLexicon select_eval_gold(const GoldLexicon& gold, const Vocabulary& src_vocab, std::size_t size,
                             std::size_t min_freq, std::uint64_t seed) {
  std::vector<std::string> eligible;
  for (const auto& [src, tgts] : gold.entries) {
    const auto id = src_vocab.id_of(src);
    if (id && src_vocab.count(*id) >= min_freq) eligible.push_back(src);
  }
  Rng rng(seed);
  for (std::size_t i = eligible.size(); i > 1; --i) std::swap(eligible[i - 1], eligible[uniform_index(rng, i)]);
  if (eligible.size() > size) eligible.resize(size);
  GoldLexicon out;
  for (const auto& s : eligible) out.entries[s] = gold.entries.at(s);
  return out;
}

void ingest(const PipelineConfig& c, const std::string& stage) {
  ParallelCorpus corpus;
  const LanguageTag src(c.src_lang), tgt(c.tgt_lang);
  if (!c.tsv_path.empty()) {
    corpus = ingest_tsv(read_lines(c.tsv_path), src, tgt);
  } else {
    corpus = ingest_parallel(read_lines(c.src_path), read_lines(c.tgt_path), src, tgt);
  }
  const CorpusStats s = corpus_stats(corpus);
  log_line(stage, c.src_lang + ": " + std::to_string(s.src.tokens) + " tokens, " + std::to_string(s.src.types) +
                      " types, " + std::to_string(s.src.sentences) + " sentences");
  log_line(stage, c.tgt_lang + ": " + std::to_string(s.tgt.tokens) + " tokens, " + std::to_string(s.tgt.types) +
                      " types; dropped pairs " + std::to_string(s.dropped_pairs));
  write_corpus(corpus, c.artifact("corpus"));
}

void align_ibm1(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  const TranslationTable fwd = train_ibm1(corpus, c.ibm1);
  const ParallelCorpus rev_corpus = swapped(corpus);
  const TranslationTable rev = train_ibm1(rev_corpus, c.ibm1);
  write_table(fwd, corpus.src_vocab, corpus.tgt_vocab, c.artifact("ibm1_fwd"));
  write_table(rev, corpus.tgt_vocab, corpus.src_vocab, c.artifact("ibm1_rev"));
  log_line(stage, std::to_string(c.ibm1.iterations) + " EM iterations in each direction");
}

void align_sample(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  SamplingOptions opt;
  opt.num_samples = c.sampling_samples;
  opt.seed = derive_seed(c.seed, stage);
  opt.threads = c.threads;
  opt.time_budget_seconds = c.sampling_time_budget;
  const SamplingAccumulator acc = accumulate_samples(corpus, opt);
  write_table(association_table(acc, corpus, false), corpus.src_vocab, corpus.tgt_vocab, c.artifact("sampling_fwd"));
  write_table(association_table(acc, corpus, true), corpus.tgt_vocab, corpus.src_vocab, c.artifact("sampling_rev"));
  log_line(stage, std::to_string(acc.samples_run) + " sub-corpora sampled, " + std::to_string(acc.pair_counts.size()) +
                      " candidate pairs");
}

void seed_lexicon(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  const auto& sv = corpus.src_vocab;
  const auto& tv = corpus.tgt_vocab;
  const auto ibm = symmetric_pairs(read_table(c.artifact("ibm1_fwd"), sv, tv), read_table(c.artifact("ibm1_rev"), tv, sv));
  const auto smp = symmetric_pairs(read_table(c.artifact("sampling_fwd"), sv, tv),
                                   read_table(c.artifact("sampling_rev"), tv, sv));
  std::set<std::string> exclude;
  if (!c.gold_path.empty()) {
    const GoldLexicon gold = read_gold(c.gold_path);
    const GoldLexicon eval = c.eval_size == 0
                                 ? gold
                                 : select_eval_gold(gold, sv, c.eval_size, c.eval_min_freq, derive_seed(c.seed, "eval-select"));
    if (c.eval_size > 0)
      for (const auto& [s, t] : eval.entries) exclude.insert(s);
    write_gold(eval, c.artifact("eval_gold"));
    log_line(stage, std::to_string(eval.entries.size()) + " evaluation words held out");
  }
  const SeedLexicon lex = build_seed_lexicon(ibm, smp, sv, tv, c.lexicon_cut, exclude);
  const auto tier1 = std::count_if(lex.entries.begin(), lex.entries.end(), [](const auto& e) { return e.tier == 1; });
  log_line(stage, std::to_string(ibm.size()) + " symmetric IBM-1 pairs, " + std::to_string(smp.size()) +
                      " symmetric sampling pairs; lexicon has " + std::to_string(lex.entries.size()) + " entries (" +
                      std::to_string(tier1) + " tier 1)");
  write_lexicon(lex, c.artifact("seed_lexicon"));
}

void build_graph_stage(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  const TranslationTable table = read_table(c.artifact("sampling_fwd"), corpus.src_vocab, corpus.tgt_vocab);
  const BilingualGraph graph = build_graph(table, corpus.src_vocab, corpus.tgt_vocab, c.graph_top_k, c.graph_min_score);
  log_line(stage, std::to_string(graph.num_nodes()) + " nodes, " + std::to_string(graph.num_edges()) + " edges");
  write_edges(graph, c.artifact("graph"));
}

void embed_graph(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  const BilingualGraph graph = read_edges(c.artifact("graph"), corpus.src_vocab, corpus.tgt_vocab);
  const AliasSampler sampler = build_alias(graph);
  const std::uint64_t seed = derive_seed(c.seed, stage);
  const WalkCorpus walks = generate_walks(graph, sampler, c.walk, derive_seed(seed, "walks"), c.threads);
  std::vector<std::string> labels;
  for (const auto& n : graph.nodes()) labels.push_back(n.label);
  const auto start = std::chrono::steady_clock::now();
  const Embedding emb = train<float>(walks.walks, labels, stage_train_config(c.n2v, c, derive_seed(seed, "sgns")));
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  log_line(stage, std::to_string(walks.walks.size()) + " walks, " + std::to_string(c.n2v.epochs) + " epochs in " +
                      std::to_string(took.count()) + " s");
  write_walks(walks, graph, c.artifact("walks"));
  write_embeddings(emb, c.artifact("emb_n2v"));
}

void embed_corpus(const PipelineConfig& c, const std::string& stage) {
  const ParallelCorpus corpus = read_corpus(c.artifact("corpus"));
  const std::uint64_t seed = derive_seed(c.seed, stage);
  const Embedding src = train<float>(side_sequences(corpus, true), corpus_vocab_labels(corpus.src_vocab),
                                     stage_train_config(c.w2v, c, derive_seed(seed, "src")));
  const Embedding tgt = train<float>(side_sequences(corpus, false), corpus_vocab_labels(corpus.tgt_vocab),
                                     stage_train_config(c.w2v, c, derive_seed(seed, "tgt")));
  write_embeddings(src, c.artifact("emb_w2v_src"));
  write_embeddings(tgt, c.artifact("emb_w2v_tgt"));
  log_line(stage, "trained " + std::to_string(src.size()) + " + " + std::to_string(tgt.size()) + " word vectors");
}

void fit_map_stage(const PipelineConfig& c, const std::string& stage) {
  const SeedLexicon lex = read_lexicon(c.artifact("seed_lexicon"));
  auto fit = [&](const Embedding& src, const Embedding& tgt, const fs::path& out, const std::string& label) {
    const auto pairs = lexicon_pairs<double>(lex, src, c.src_lang, tgt, c.tgt_lang);
    const auto map = fit_linear_map<double>(pairs.X, pairs.Y, c.map_gamma, c.map_method);
    log_line(stage, label + ": fitted on " + std::to_string(map.fitted_on) + " pairs, skipped " +
                        std::to_string(pairs.skipped));
    write_map(map, out);
  };
  const Embedding n2v = read_embeddings<float>(c.artifact("emb_n2v"));
  fit(n2v, n2v, c.artifact("map_n2v"), "n2v");
  fit(read_embeddings<float>(c.artifact("emb_w2v_src")), read_embeddings<float>(c.artifact("emb_w2v_tgt")),
      c.artifact("map_w2v"), "w2v");
}

std::vector<std::string> tokens_of(const Translation& t) {
  std::vector<std::string> out;
  for (const auto& n : *t) out.push_back(n.token);
  return out;
}

void translate_stage(const PipelineConfig& c, const std::string& stage) {
  const GoldLexicon eval = read_gold(c.artifact("eval_gold"));
  const Embedding n2v = read_embeddings<float>(c.artifact("emb_n2v"));
  const Embedding w2v_src = read_embeddings<float>(c.artifact("emb_w2v_src"));
  const Embedding w2v_tgt = read_embeddings<float>(c.artifact("emb_w2v_tgt"));
  const auto map_n2v = read_map<double>(c.artifact("map_n2v"));
  const auto map_w2v = read_map<double>(c.artifact("map_w2v"));

  std::vector<std::pair<std::string, std::vector<QueryPrediction>>> systems = {
      {"n2v-nomap", {}}, {"n2v-map", {}}, {"w2v-map", {}}};
  auto add = [](std::vector<QueryPrediction>& into, const std::string& src, const Translation& t) {
    into.push_back({src, t ? std::optional(tokens_of(t)) : std::nullopt});
  };
  for (const auto& [src, tgts] : eval.entries) {
    add(systems[0].second, src, translate_direct(src, n2v, c.src_lang, c.tgt_lang, c.retrieval_k));
    add(systems[1].second, src, translate_mapped(src, n2v, map_n2v, n2v, c.src_lang, c.tgt_lang, c.retrieval_k));
    add(systems[2].second, src, translate_mapped(src, w2v_src, map_w2v, w2v_tgt, c.src_lang, c.tgt_lang, c.retrieval_k));
  }
  write_predictions(systems, c.artifact("predictions"));
  log_line(stage, std::to_string(eval.entries.size()) + " queries translated by 3 systems");
}

void eval_stage(const PipelineConfig& c, const std::string& stage) {
  const GoldLexicon eval = read_gold(c.artifact("eval_gold"));
  std::vector<NamedReport> reports;
  for (const auto& [system, preds] : read_predictions(c.artifact("predictions"))) {
    reports.push_back({system, precision_at_k(preds, eval, {1, 5, 10})});
    const auto& r = reports.back().report;
    log_line(stage, system + ": P@1 " + format_double(r.p_at.at(1)) + ", P@5 " + format_double(r.p_at.at(5)) +
                        ", P@10 " + format_double(r.p_at.at(10)) + " over " + std::to_string(r.evaluated));
  }
  write_report_summary(reports, c.artifact("report"));
  write_report_detail(reports, c.artifact("report_detail"));
  write_report_json(reports, c.artifact("report_json"));
}

void export_plot_stage(const PipelineConfig& c, const std::string& stage) {
  const Embedding n2v = read_embeddings<float>(c.artifact("emb_n2v"));
  std::vector<std::string> tokens = c.plot_tokens;
  if (tokens.empty()) {
    const GoldLexicon eval = read_gold(c.artifact("eval_gold"));
    for (const auto& [src, tgts] : eval.entries) {
      tokens.push_back(tagged(LanguageTag(c.src_lang), src));
      for (const auto& t : tgts) tokens.push_back(tagged(LanguageTag(c.tgt_lang), t));
    }
  }
  const auto points = export_plot(n2v, tokens);
  write_plot(points, c.artifact("plot"));
  log_line(stage, std::to_string(points.size()) + " points projected");
}

const std::vector<Stage>& stages() {
  using P = std::vector<fs::path>;
  static const std::vector<Stage> all = {
      {"ingest",
       [](const PipelineConfig& c) {
         if (!c.tsv_path.empty()) return P{c.tsv_path};
         if (c.src_path.empty() || c.tgt_path.empty()) {
           throw ParameterError("set tsv_path, or both src_path and tgt_path");
         }
         return P{c.src_path, c.tgt_path};
       },
       [](const PipelineConfig& c) { return P{corpus_marker(c)}; }, ingest},
      {"align-ibm1", [](const PipelineConfig& c) { return P{corpus_marker(c)}; },
       [](const PipelineConfig& c) { return P{c.artifact("ibm1_fwd"), c.artifact("ibm1_rev")}; }, align_ibm1},
      {"align-sample", [](const PipelineConfig& c) { return P{corpus_marker(c)}; },
       [](const PipelineConfig& c) { return P{c.artifact("sampling_fwd"), c.artifact("sampling_rev")}; }, align_sample},
      {"seed-lexicon",
       [](const PipelineConfig& c) {
         P in{corpus_marker(c), c.artifact("ibm1_fwd"), c.artifact("ibm1_rev"), c.artifact("sampling_fwd"),
              c.artifact("sampling_rev")};
         if (!c.gold_path.empty()) in.push_back(c.gold_path);
         return in;
       },
       [](const PipelineConfig& c) {
         P out{c.artifact("seed_lexicon")};
         if (!c.gold_path.empty()) out.push_back(c.artifact("eval_gold"));
         return out;
       },
       seed_lexicon},
      {"build-graph", [](const PipelineConfig& c) { return P{corpus_marker(c), c.artifact("sampling_fwd")}; },
       [](const PipelineConfig& c) { return P{c.artifact("graph")}; }, build_graph_stage},
      {"embed-graph", [](const PipelineConfig& c) { return P{corpus_marker(c), c.artifact("graph")}; },
       [](const PipelineConfig& c) { return P{c.artifact("walks"), c.artifact("emb_n2v")}; }, embed_graph},
      {"embed-corpus", [](const PipelineConfig& c) { return P{corpus_marker(c)}; },
       [](const PipelineConfig& c) { return P{c.artifact("emb_w2v_src"), c.artifact("emb_w2v_tgt")}; }, embed_corpus},
      {"fit-map",
       [](const PipelineConfig& c) {
         return P{c.artifact("seed_lexicon"), c.artifact("emb_n2v"), c.artifact("emb_w2v_src"), c.artifact("emb_w2v_tgt")};
       },
       [](const PipelineConfig& c) { return P{c.artifact("map_n2v"), c.artifact("map_w2v")}; }, fit_map_stage},
      {"translate",
       [](const PipelineConfig& c) {
         return P{c.artifact("eval_gold"), c.artifact("emb_n2v"), c.artifact("emb_w2v_src"), c.artifact("emb_w2v_tgt"),
                  c.artifact("map_n2v"), c.artifact("map_w2v")};
       },
       [](const PipelineConfig& c) { return P{c.artifact("predictions")}; }, translate_stage},
      {"eval", [](const PipelineConfig& c) { return P{c.artifact("predictions"), c.artifact("eval_gold")}; },
       [](const PipelineConfig& c) {
         return P{c.artifact("report"), c.artifact("report_detail"), c.artifact("report_json")};
       },
       eval_stage},
      {"export-plot",
       [](const PipelineConfig& c) {
         P in{c.artifact("emb_n2v")};
         if (c.plot_tokens.empty()) in.push_back(c.artifact("eval_gold"));
         return in;
       },
       [](const PipelineConfig& c) { return P{c.artifact("plot")}; }, export_plot_stage},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : stages()) n.push_back(s.name);
    return n;
  }();
  return names;
}

namespace {

const Stage& find_stage(const std::string& name) {
  const auto& all = stages();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Stage& s) { return s.name == name; });
  if (it == all.end()) throw StageError(name, "unknown stage");
  return *it;
}

}  // namespace

std::vector<fs::path> stage_inputs(const std::string& stage, const PipelineConfig& config) {
  return find_stage(stage).inputs(config);
}

std::vector<fs::path> stage_outputs(const std::string& stage, const PipelineConfig& config) {
  return find_stage(stage).outputs(config);
}

void run_stage(const std::string& name, const PipelineConfig& config, const RunOptions& options) {
  const Stage* it = &find_stage(name);
  try {
    config.validate();
    for (const auto& in : it->inputs(config)) {
      if (!fs::exists(in)) throw StageError(name, "missing input " + in.string());
    }
    if (!options.force) {
      for (const auto& out : it->outputs(config)) {
        if (fs::exists(out)) throw StageError(name, "output " + out.string() + " exists (use --force to overwrite)");
      }
    }
    fs::create_directories(config.work_dir);
    log_line(name, "start");
    it->run(config, name);
    log_line(name, "done");
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  for (const auto& s : stage_names()) run_stage(s, config, options);
}

}  // namespace bilex
