#include "stage/forms.hpp"

#include <algorithm>

#include "stage/csv.hpp"
#include "stage/text.hpp"

namespace stage {

RoundForm emit_round_form(const RoundConsensus& prev, const std::vector<std::string>& retained, int round_no,
                          const IndicatorTree& tree) {
  if (round_no < 2) fail(ErrorKind::InvalidInput, "consultation forms start at round 2");
  if (retained.empty()) fail(ErrorKind::InvalidInput, "no indicators retained for round " + std::to_string(round_no));
  RoundForm form;
  form.round_no = round_no;
  form.instructions =
      "Round " + std::to_string(round_no) +
      ": rate the importance of each indicator from 1 to " + std::to_string(prev.scale_max) +
      ". prev_mean is the panel mean from round " + std::to_string(prev.round_no) + ", shown for reference.";
  for (const auto& id : retained) {
    auto it = prev.indicators.find(id);
    if (it == prev.indicators.end()) {
      fail(ErrorKind::InvalidInput, "retained indicator '" + id + "' has no round " +
                                        std::to_string(prev.round_no) + " statistics");
    }
    const auto* node = tree.find(id);
    form.rows.push_back({id, node ? node->name : std::string(), it->second.mean});
  }
  std::sort(form.rows.begin(), form.rows.end(),
            [](const RoundFormRow& a, const RoundFormRow& b) { return a.indicator_id < b.indicator_id; });
  form.rows.erase(std::unique(form.rows.begin(), form.rows.end(),
                              [](const RoundFormRow& a, const RoundFormRow& b) { return a.indicator_id == b.indicator_id; }),
                  form.rows.end());
  return form;
}

std::string render_round_form_csv(const RoundForm& form, int places) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : form.rows) rows.push_back({r.indicator_id, r.name, format_fixed(r.prev_mean, places), ""});
  return write_csv({"indicator_id", "name", "prev_mean", "rating"}, rows);
}

std::string render_round_form_markdown(const RoundForm& form, int places) {
  std::string out = "# Round " + std::to_string(form.round_no) + " consultation form\n\n" + form.instructions + "\n\n";
  out += "| Indicator | Name | Previous mean | Rating |\n|---|---|---:|---|\n";
  for (const auto& r : form.rows) {
    out += "| " + r.indicator_id + " | " + r.name + " | " + format_fixed(r.prev_mean, places) + " |  |\n";
  }
  return out;
}

FilledForm parse_filled_form(std::string_view csv, const std::string& source) {
  const auto t = parse_csv(csv, source);
  const std::size_t id_col = t.column("indicator_id");
  const std::size_t rating_col = t.column("rating");
  if (id_col == t.header.size() || rating_col == t.header.size()) {
    fail_at(ErrorKind::Schema, source, 1, 0, "form needs 'indicator_id' and 'rating' columns");
  }
  FilledForm out;
  for (const auto& row : t.rows) {
    out.indicator_ids.emplace_back(trim(row.fields[id_col]));
    const auto cell = trim(row.fields[rating_col]);
    if (cell.empty()) {
      out.ratings.emplace_back();
      continue;
    }
    const auto v = parse_integer(cell);
    if (!v) fail_at(ErrorKind::InvalidInput, source, row.line, rating_col + 1, "rating is not an integer");
    out.ratings.emplace_back(static_cast<int>(*v));
  }
  return out;
}

RatingRound assemble_round(const std::vector<std::pair<std::string, FilledForm>>& sheets, int round_no,
                           int scale_max, std::size_t distributed) {
  if (sheets.empty()) fail(ErrorKind::InvalidInput, "no returned forms");
  const auto& ids = sheets.front().second.indicator_ids;
  std::vector<ExpertRatings> rows;
  for (const auto& [expert, sheet] : sheets) {
    if (sheet.indicator_ids != ids) {
      fail(ErrorKind::InvalidInput, "form of '" + expert + "' lists different indicators");
    }
    ExpertRatings er{expert, std::nullopt};
    if (std::all_of(sheet.ratings.begin(), sheet.ratings.end(), [](const auto& r) { return r.has_value(); })) {
      std::vector<int> values;
      for (const auto& r : sheet.ratings) values.push_back(*r);
      er.ratings = std::move(values);
    }
    rows.push_back(std::move(er));
  }
  return RatingRound(round_no, scale_max, distributed, ids, std::move(rows));
}

}  // namespace stage
