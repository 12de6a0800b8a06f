#include "bilex/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

const std::map<std::string, std::string>& artifact_defaults() {
  static const std::map<std::string, std::string> defaults = {
      {"corpus", "corpus"},
      {"ibm1_fwd", "ibm1.fwd.tsv"},
      {"ibm1_rev", "ibm1.rev.tsv"},
      {"sampling_fwd", "sampling.fwd.tsv"},
      {"sampling_rev", "sampling.rev.tsv"},
      {"seed_lexicon", "seed_lexicon.tsv"},
      {"eval_gold", "eval_gold.tsv"},
      {"graph", "graph.edges.tsv"},
      {"walks", "graph.walks.txt"},
      {"emb_n2v", "emb.n2v.txt"},
      {"emb_w2v_src", "emb.w2v.src.txt"},
      {"emb_w2v_tgt", "emb.w2v.tgt.txt"},
      {"map_n2v", "map.n2v.txt"},
      {"map_w2v", "map.w2v.txt"},
      {"predictions", "predictions.tsv"},
      {"report", "report.tsv"},
      {"report_detail", "report.detail.tsv"},
      {"report_json", "report.json"},
      {"plot", "plot.tsv"},
  };
  return defaults;
}

std::filesystem::path PipelineConfig::artifact(const std::string& name) const {
  const auto& defaults = artifact_defaults();
  const auto it = defaults.find(name);
  if (it == defaults.end()) throw ParameterError("unknown artifact '" + name + "'");
  if (auto p = paths.find(name); p != paths.end()) return p->second;
  return std::filesystem::path(work_dir) / it->second;
}

namespace {

struct Field {
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("config key " + key + ": expected true/false, got '" + v + "'");
}

std::size_t parse_count(const std::string& v, const std::string& key) {
  const long long x = parse_int(v, key);
  if (x < 0) throw ParameterError("config key " + key + " must be non-negative");
  return static_cast<std::size_t>(x);
}

#define BILEX_STRING(name, member)                                  \
  Field {                                                           \
    name, [](const PipelineConfig& c) { return c.member; },         \
        [](PipelineConfig& c, const std::string& v) { c.member = v; } \
  }
#define BILEX_COUNT(name, member)                                                            \
  Field {                                                                                    \
    name, [](const PipelineConfig& c) { return std::to_string(c.member); },                  \
        [](PipelineConfig& c, const std::string& v) { c.member = parse_count(v, name); }     \
  }
#define BILEX_REAL(name, member)                                                             \
  Field {                                                                                    \
    name, [](const PipelineConfig& c) { return format_double(c.member); },                  \
        [](PipelineConfig& c, const std::string& v) { c.member = parse_double(v, name); }    \
  }

void add_train_fields(std::vector<Field>& f, const std::string& prefix, TrainConfig PipelineConfig::*member) {
  auto count = [&](const std::string& key, std::size_t TrainConfig::*m) {
    const std::string full = prefix + "." + key;
    f.push_back({full, [member, m](const PipelineConfig& c) { return std::to_string((c.*member).*m); },
                 [member, m, full](PipelineConfig& c, const std::string& v) { (c.*member).*m = parse_count(v, full); }});
  };
  auto real = [&](const std::string& key, double TrainConfig::*m) {
    const std::string full = prefix + "." + key;
    f.push_back({full, [member, m](const PipelineConfig& c) { return format_double((c.*member).*m); },
                 [member, m, full](PipelineConfig& c, const std::string& v) { (c.*member).*m = parse_double(v, full); }});
  };
  count("dim", &TrainConfig::dim);
  count("window", &TrainConfig::window);
  count("negatives", &TrainConfig::negatives);
  count("epochs", &TrainConfig::epochs);
  real("initial_lr", &TrainConfig::initial_lr);
  real("final_lr", &TrainConfig::final_lr);
  real("noise_exponent", &TrainConfig::noise_exponent);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f = {
        BILEX_STRING("src_lang", src_lang),
        BILEX_STRING("tgt_lang", tgt_lang),
        BILEX_STRING("src_path", src_path),
        BILEX_STRING("tgt_path", tgt_path),
        BILEX_STRING("tsv_path", tsv_path),
        BILEX_STRING("gold_path", gold_path),
        BILEX_STRING("work_dir", work_dir),
        Field{"seed", [](const PipelineConfig& c) { return std::to_string(c.seed); },
              [](PipelineConfig& c, const std::string& v) {
                c.seed = static_cast<std::uint64_t>(parse_count(v, "seed"));
              }},
        BILEX_COUNT("threads", threads),
        BILEX_COUNT("ibm1.iterations", ibm1.iterations),
        Field{"ibm1.null_word", [](const PipelineConfig& c) { return bool_str(c.ibm1.null_word); },
              [](PipelineConfig& c, const std::string& v) { c.ibm1.null_word = parse_bool(v, "ibm1.null_word"); }},
        BILEX_REAL("ibm1.prune_below", ibm1.prune_below),
        BILEX_COUNT("sampling.samples", sampling_samples),
        BILEX_REAL("sampling.time_budget", sampling_time_budget),
        BILEX_COUNT("lexicon.cut", lexicon_cut),
        BILEX_COUNT("eval.size", eval_size),
        BILEX_COUNT("eval.min_freq", eval_min_freq),
        BILEX_COUNT("graph.top_k", graph_top_k),
        BILEX_REAL("graph.min_score", graph_min_score),
        BILEX_COUNT("walk.num_walks", walk.num_walks),
        BILEX_COUNT("walk.length", walk.walk_length),
        BILEX_REAL("walk.p", walk.p),
        BILEX_REAL("walk.q", walk.q),
    };
    add_train_fields(f, "n2v", &PipelineConfig::n2v);
    add_train_fields(f, "w2v", &PipelineConfig::w2v);
    f.push_back(BILEX_REAL("map.gamma", map_gamma));
    f.push_back({"map.method",
                 [](const PipelineConfig& c) {
                   return std::string(c.map_method == FitMethod::closed_form ? "closed_form" : "gradient");
                 },
                 [](PipelineConfig& c, const std::string& v) {
                   if (v == "closed_form") c.map_method = FitMethod::closed_form;
                   else if (v == "gradient") c.map_method = FitMethod::gradient;
                   else throw ParameterError("map.method must be closed_form or gradient");
                 }});
    f.push_back(BILEX_COUNT("retrieval.k", retrieval_k));
    f.push_back({"plot.tokens",
                 [](const PipelineConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.plot_tokens.size(); ++i) out += (i ? "," : "") + c.plot_tokens[i];
                   return out;
                 },
                 [](PipelineConfig& c, const std::string& v) {
                   c.plot_tokens.clear();
                   if (v.empty()) return;
                   for (const auto& t : split(v, ','))
                     if (!trim(t).empty()) c.plot_tokens.emplace_back(trim(t));
                 }});
    return f;
  }();
  return all;
}

#undef BILEX_STRING
#undef BILEX_COUNT
#undef BILEX_REAL

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key.rfind("path.", 0) == 0) {
    const std::string name = key.substr(5);
    if (!artifact_defaults().count(name)) throw ParameterError("unknown config key '" + key + "'");
    paths[name] = value;
    return;
  }
  for (const auto& f : fields()) {
    if (f.key == key) {
      try {
        f.set(*this, value);
      } catch (const FormatError& e) {
        throw ParameterError(e.what());
      }
      return;
    }
  }
  throw ParameterError("unknown config key '" + key + "'");
}

void PipelineConfig::validate() const {
  LanguageTag a(src_lang), b(tgt_lang);
  if (a == b) throw ParameterError("src_lang and tgt_lang must differ");
  if (threads < 1) throw ParameterError("threads must be >= 1");
  if (ibm1.iterations < 1) throw ParameterError("ibm1.iterations must be >= 1");
  if (sampling_samples < 1) throw ParameterError("sampling.samples must be >= 1");
  if (sampling_time_budget < 0) throw ParameterError("sampling.time_budget must be >= 0");
  if (lexicon_cut < 1) throw ParameterError("lexicon.cut must be >= 1");
  if (graph_top_k < 1) throw ParameterError("graph.top_k must be >= 1");
  if (graph_min_score < 0) throw ParameterError("graph.min_score must be >= 0");
  if (walk.num_walks < 1) throw ParameterError("walk.num_walks must be >= 1");
  if (walk.walk_length < 2) throw ParameterError("walk.length must be >= 2");
  if (!(walk.p > 0) || !(walk.q > 0)) throw ParameterError("walk.p and walk.q must be > 0");
  n2v.validate();
  w2v.validate();
  if (!(map_gamma >= 0)) throw ParameterError("map.gamma must be >= 0");
  if (retrieval_k < 1) throw ParameterError("retrieval.k must be >= 1");
}

bool PipelineConfig::operator==(const PipelineConfig& other) const {
  return serialize_config(*this) == serialize_config(other);
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    config.set(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
  }
  config.validate();
  return config;
}

PipelineConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  for (const auto& [name, path] : config.paths) out += "path." + name + " = " + path + "\n";
  return out;
}

}  // namespace bilex
