#pragma once

// Next-round consultation sheets: each retained indicator with the previous
// round's mean importance and a blank rating cell.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stage/consensus.hpp"
#include "stage/model.hpp"

namespace stage {

struct RoundFormRow {
  std::string indicator_id;
  std::string name;
  double prev_mean = 0.0;
};

struct RoundForm {
  int round_no = 2;
  std::vector<RoundFormRow> rows;  // sorted by indicator id
  std::string instructions;
};

/// Throws InvalidInput if round_no < 2, `retained` is empty, or a retained id
/// has no statistics in `prev`. Names come from `tree` (empty when absent).
RoundForm emit_round_form(const RoundConsensus& prev, const std::vector<std::string>& retained, int round_no,
                          const IndicatorTree& tree);

/// indicator_id,name,prev_mean,rating with prev_mean at `places` decimals.
std::string render_round_form_csv(const RoundForm& form, int places = 4);
std::string render_round_form_markdown(const RoundForm& form, int places = 4);

/// One expert's returned sheet.
struct FilledForm {
  std::vector<std::string> indicator_ids;
  std::vector<std::optional<int>> ratings;
};

FilledForm parse_filled_form(std::string_view csv, const std::string& source);

/// Stack returned sheets (expert id, sheet) into a round. All sheets must list
/// the same indicators; a sheet with any blank rating counts as not returned.
RatingRound assemble_round(const std::vector<std::pair<std::string, FilledForm>>& sheets, int round_no,
                           int scale_max, std::size_t distributed);

}  // namespace stage
