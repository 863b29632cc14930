#pragma once

// Strict readers (and the few writers) for the tool's input files. Every
// error names the file and, where a cell is at fault, its line and column.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stage/ahp.hpp"
#include "stage/consensus.hpp"
#include "stage/csv.hpp"
#include "stage/model.hpp"

namespace stage {

/// indicators.csv: id,name,level,parent_id,bonus[,local_weight,global_weight]
IndicatorTree parse_indicators(const CsvTable& table);
IndicatorTree read_indicators(const std::filesystem::path& path);
/// Always writes the 7-column form; weights use shortest round-trip digits.
std::string write_indicators(const IndicatorTree& tree);

/// experts.csv: id,group,familiarity,basis_theory,basis_practice,basis_peer,basis_intuition
std::vector<ExpertProfile> parse_experts(const CsvTable& table);
std::vector<ExpertProfile> read_experts(const std::filesystem::path& path);

struct RatingsOptions {
  int round_no = 1;
  int scale_max = 5;
  /// Questionnaires sent; defaults to the number of rows in the file.
  std::optional<std::size_t> distributed;
  /// When set, every indicator column must be one of these ids.
  std::optional<std::set<std::string>> known_indicators;
};

/// ratings_roundK.csv: expert_id, then one column per indicator id. A row with
/// any blank cell is recorded as a non-response.
RatingRound parse_ratings(const CsvTable& table, const RatingsOptions& options);
RatingRound read_ratings(const std::filesystem::path& path, const RatingsOptions& options);

/// responses.csv: respondent_id,q1..q21. Blank cells are missing answers.
ConsumerResponses parse_responses(const CsvTable& table, const Instrument& instrument);
ConsumerResponses read_responses(const std::filesystem::path& path, const Instrument& instrument);

/// expert_bonus.csv: expert_id,<one column per bonus indicator>
BonusRatings parse_expert_bonus(const CsvTable& table, const Instrument& instrument);
BonusRatings read_expert_bonus(const std::filesystem::path& path, const Instrument& instrument);

/// Square table; header row and first column carry the same ids in the same
/// order. Entries may be decimals or fractions such as "1/3".
PairwiseMatrix parse_pairwise(const CsvTable& table);
PairwiseMatrix read_pairwise(const std::filesystem::path& path);

struct ImportanceRatings {
  std::vector<std::string> rater_ids;
  std::vector<std::string> item_ids;
  Matrix<int> ratings;  // raters x items, 1..7
};

/// importance.csv: rater_id, then one column per item id.
ImportanceRatings parse_importance(const CsvTable& table);
ImportanceRatings read_importance(const std::filesystem::path& path);

/// JSON {"judgment": {"theory": [l,m,s], "practice": [...], "peer": [...],
/// "intuition": [...]}, "familiarity": [5 values]}; missing keys keep defaults.
AuthorityTables read_authority_tables(const std::filesystem::path& path);

/// JSON {"mean_floor": x, "fsf_floor": y, "cv_ceiling": z}
ScreeningThresholds read_thresholds(const std::filesystem::path& path);

}  // namespace stage
