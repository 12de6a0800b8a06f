#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bilex/graph.hpp"
#include "bilex/ibm1.hpp"
#include "bilex/mapping.hpp"
#include "bilex/sgns.hpp"

namespace bilex {

// Every stage parameter plus input/output locations. Text form: one
// "key = value" per line, '#' comments; unknown keys are errors.
struct PipelineConfig {
  std::string src_lang = "es";
  std::string tgt_lang = "na";
  std::string src_path;   // one sentence per line
  std::string tgt_path;
  std::string tsv_path;   // alternative: src<TAB>tgt per line
  std::string gold_path;  // src<TAB>tgt gold translations
  std::string work_dir = "work";
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  Ibm1Options ibm1{};
  std::size_t sampling_samples = 50000;
  double sampling_time_budget = 0.0;

  std::size_t lexicon_cut = 553;
  std::size_t eval_size = 30;
  std::size_t eval_min_freq = 3;

  std::size_t graph_top_k = 10;
  double graph_min_score = 0.0;
  WalkParams walk{};

  TrainConfig n2v{};
  TrainConfig w2v = [] {
    TrainConfig c;
    c.epochs = 5;
    return c;
  }();

  double map_gamma = 0.1;
  FitMethod map_method = FitMethod::closed_form;
  std::size_t retrieval_k = 10;
  std::vector<std::string> plot_tokens;  // tagged tokens; empty = eval words and their gold targets

  // artifact name -> explicit path; others default to work_dir/<file>
  std::map<std::string, std::string> paths;

  std::filesystem::path artifact(const std::string& name) const;
  void set(const std::string& key, const std::string& value);
  void validate() const;
  bool operator==(const PipelineConfig&) const;
};

// Names of every artifact and their default file names under work_dir.
const std::map<std::string, std::string>& artifact_defaults();

PipelineConfig parse_config(const std::string& text);
PipelineConfig read_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& config);

}  // namespace bilex
