#pragma once

// ReportBundle: every computed table of a run, serialized deterministically.
// JSON carries full-precision numbers next to rounded "<key>_display"
// strings; markdown renders the same display strings.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stage/ahp.hpp"
#include "stage/consensus.hpp"
#include "stage/psychometrics.hpp"
#include "stage/scoring.hpp"

namespace stage {

enum class ReportFormat { Json, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view text);

/// Decimal places for display strings. Coefficients (authority, W, weights,
/// alpha, CITC, descriptives) default to 4; ratios shown as percentages in
/// the source tables (positivity, CVI, importance means, scores) to 2.
struct DisplayOptions {
  int coefficient_places = 4;
  int ratio_places = 2;

  static DisplayOptions uniform(int places) { return {places, places}; }
};

struct ScreeningSection {
  ScreeningThresholds thresholds;
  bool derived = true;
  ScreeningOutcome outcome;
};

struct RoundSection {
  RoundConsensus consensus;
  std::optional<ScreeningSection> screening;
};

struct ReportBundle {
  std::vector<RoundSection> rounds;
  std::optional<WeightTable> weights;
  std::optional<ReliabilityTable> reliability;
  std::optional<ValidityTable> validity;
  std::optional<ScoreCard> score;

  const RoundSection* find_round(int round_no) const;
};

nlohmann::ordered_json report_to_json(const ReportBundle& bundle, const DisplayOptions& display = {});
/// Rebuilds a bundle from full-precision JSON values; display strings are ignored.
ReportBundle report_from_json(const nlohmann::json& j, const std::string& source = "report");
ReportBundle read_report(const std::filesystem::path& path);

/// Sections present in `from` replace those in `into`; rounds are matched by number.
void merge_report(ReportBundle& into, const ReportBundle& from);

std::string render_report(const ReportBundle& bundle, ReportFormat format, const DisplayOptions& display = {});

}  // namespace stage
