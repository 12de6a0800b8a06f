// bilex: bilingual lexicon extraction pipeline driver.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "bilex/config.hpp"
#include "bilex/pipeline.hpp"
#include "bilex/synthetic.hpp"
#include "bilex/util.hpp"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
  bool force = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value config file");
  cmd->add_option("--seed", c.seed, "master seed (overrides config)");
  cmd->add_option("--threads", c.threads, "worker threads; 1 = deterministic mode")->check(CLI::PositiveNumber);
  cmd->add_option("--set", c.sets, "override a config key, as key=value")->take_all();
  cmd->add_flag("--force", c.force, "overwrite existing outputs");
  cmd->add_flag("--quiet", c.quiet, "suppress log lines");
}

bilex::PipelineConfig load(const Common& c) {
  bilex::PipelineConfig config = c.config_path.empty() ? bilex::PipelineConfig{} : bilex::read_config(c.config_path);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bilex::ParameterError("--set expects key=value, got '" + kv + "'");
    config.set(std::string(bilex::trim(kv.substr(0, eq))), std::string(bilex::trim(kv.substr(eq + 1))));
  }
  if (c.seed) config.seed = *c.seed;
  if (c.threads) config.threads = *c.threads;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilingual lexicon extraction from parallel corpora"};
  app.require_subcommand(1);
  Common common;

  std::vector<std::pair<std::string, CLI::App*>> stage_cmds;
  for (const auto& name : bilex::stage_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " stage");
    add_common(cmd, common);
    stage_cmds.emplace_back(name, cmd);
  }
  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipeline, common);

  auto* show = app.add_subcommand("show-config", "print the effective config");
  add_common(show, common);

  std::size_t vocab_size = 200, sentences = 2000;
  std::uint64_t synth_seed = 7;
  std::string out_dir = "synthetic";
  auto* synth = app.add_subcommand("generate-synthetic", "write a synthetic parallel corpus and gold lexicon");
  synth->add_option("--vocab-size", vocab_size, "word pairs in the bijective lexicon");
  synth->add_option("--sentences", sentences, "sentence pairs");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  std::string stage = "cli";
  try {
    if (synth->parsed()) {
      stage = "generate-synthetic";
      const auto corpus = bilex::generate_synthetic(vocab_size, sentences, synth_seed);
      bilex::write_synthetic(corpus, out_dir);
      bilex::log_line(stage, std::to_string(corpus.src_lines.size()) + " sentence pairs written to " + out_dir);
      return 0;
    }
    bilex::set_log_enabled(!common.quiet);
    const bilex::PipelineConfig config = load(common);
    const bilex::RunOptions options{common.force};
    if (show->parsed()) {
      std::cout << bilex::serialize_config(config);
      return 0;
    }
    if (pipeline->parsed()) {
      stage = "pipeline";
      bilex::run_pipeline(config, options);
      return 0;
    }
    for (const auto& [name, cmd] : stage_cmds) {
      if (cmd->parsed()) {
        stage = name;
        bilex::run_stage(name, config, options);
      }
    }
    return 0;
  } catch (const bilex::StageError& e) {
    std::fprintf(stderr, "bilex: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bilex: error: stage '%s': %s\n", stage.c_str(), e.what());
    return 1;
  }
}
