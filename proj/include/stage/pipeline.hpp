#pragma once

// End-to-end run driven by one declarative JSON config:
// round stats -> screen -> weights -> reliability -> validity -> score.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stage/ahp.hpp"
#include "stage/report.hpp"

namespace stage {

struct RoundInput {
  int round_no = 1;
  std::filesystem::path ratings;
  std::optional<std::filesystem::path> indicators;  // columns must be ids of this file
  std::optional<std::size_t> distributed;
  std::optional<std::filesystem::path> thresholds;  // otherwise derived
};

struct PipelineConfig {
  std::vector<std::string> stages;  // subset of kPipelineStages, run in canonical order
  int scale_max = 5;
  bool correct_ties = true;
  std::optional<std::filesystem::path> experts;
  std::optional<std::filesystem::path> authority_tables;
  std::vector<RoundInput> rounds;

  std::optional<std::filesystem::path> weight_tree;
  std::vector<std::filesystem::path> pairwise;
  std::optional<int> importance_round;
  WeightMethod method = WeightMethod::Combined;

  std::optional<std::filesystem::path> reliability_responses;
  std::optional<std::filesystem::path> validity_importance;
  int relevance_floor = 5;

  std::optional<std::filesystem::path> score_responses;
  std::optional<std::filesystem::path> score_bonus;
  double bonus_cap = 10.0;
};

inline const std::vector<std::string> kPipelineStages{"round-stats", "screen", "weights",
                                                      "reliability", "validity", "score"};

/// Relative paths resolve against `base_dir`. Throws Schema on malformed configs.
PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig read_pipeline_config(const std::filesystem::path& path);

/// Runs the requested stages in canonical order. Any failure is rethrown with
/// the stage name prefixed ("reliability: missing input (responses)").
ReportBundle run_pipeline(const PipelineConfig& config);
ReportBundle run_pipeline(const std::filesystem::path& config_path);

}  // namespace stage
