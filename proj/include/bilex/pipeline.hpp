#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bilex/config.hpp"

namespace bilex {

struct RunOptions {
  bool force = false;  // allow overwriting existing outputs
};

// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

// Files a stage reads and writes under `config`.
std::vector<std::filesystem::path> stage_inputs(const std::string& stage, const PipelineConfig& config);
std::vector<std::filesystem::path> stage_outputs(const std::string& stage, const PipelineConfig& config);

// Runs one stage. Throws StageError naming the stage when inputs are
// missing, outputs already exist (without force) or the stage fails.
void run_stage(const std::string& stage, const PipelineConfig& config, const RunOptions& options = {});

// All stages in order.
void run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace bilex
