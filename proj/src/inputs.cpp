#include "stage/inputs.hpp"

#include <algorithm>

#include "json.hpp"

#include "stage/text.hpp"

namespace stage {

namespace {

void require_header(const CsvTable& t, const std::vector<std::string_view>& expected, std::size_t optional_tail = 0) {
  const bool short_ok = optional_tail > 0 && t.header.size() == expected.size() - optional_tail;
  if (t.header.size() != expected.size() && !short_ok) {
    fail_at(ErrorKind::Schema, t.source, 1, 0, "expected " + std::to_string(expected.size()) + " columns");
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (trim(t.header[i]) != expected[i]) {
      fail_at(ErrorKind::Schema, t.source, 1, i + 1,
              "expected column '" + std::string(expected[i]) + "', found '" + t.header[i] + "'");
    }
  }
}

/// Indicator/item columns after a leading id column: unique and non-empty.
std::vector<std::string> id_columns(const CsvTable& t, std::string_view first) {
  if (t.header.empty() || trim(t.header.front()) != first) {
    fail_at(ErrorKind::Schema, t.source, 1, 1, "first column must be '" + std::string(first) + "'");
  }
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    std::string id(trim(t.header[c]));
    if (id.empty()) fail_at(ErrorKind::Schema, t.source, 1, c + 1, "empty column name");
    if (!seen.insert(id).second) fail_at(ErrorKind::Schema, t.source, 1, c + 1, "duplicate column '" + id + "'");
    ids.push_back(std::move(id));
  }
  return ids;
}

std::string row_id(const CsvTable& t, const CsvRow& row, std::set<std::string>& seen) {
  std::string id(trim(row.fields.front()));
  if (id.empty()) fail_at(ErrorKind::Schema, t.source, row.line, 1, "empty id");
  if (!seen.insert(id).second) fail_at(ErrorKind::Schema, t.source, row.line, 1, "duplicate id '" + id + "'");
  return id;
}

int integer_cell(const CsvTable& t, const CsvRow& row, std::size_t c, int lo, int hi, const std::string& what) {
  const auto v = parse_integer(row.fields[c]);
  if (!v) {
    fail_at(ErrorKind::InvalidInput, t.source, row.line, c + 1,
            "'" + row.fields[c] + "' is not an integer (" + what + ")");
  }
  if (*v < lo || *v > hi) {
    fail_at(ErrorKind::InvalidInput, t.source, row.line, c + 1,
            "value " + std::to_string(*v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                "] (" + what + ")");
  }
  return static_cast<int>(*v);
}

std::optional<double> weight_cell(const CsvTable& t, const CsvRow& row, std::size_t c) {
  if (c >= row.fields.size() || trim(row.fields[c]).empty()) return std::nullopt;
  const auto v = parse_real(row.fields[c]);
  if (!v) fail_at(ErrorKind::InvalidInput, t.source, row.line, c + 1, "'" + row.fields[c] + "' is not a number");
  return v;
}

bool bool_cell(const CsvTable& t, const CsvRow& row, std::size_t c) {
  const auto v = normalize_token(row.fields[c]);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  fail_at(ErrorKind::InvalidInput, t.source, row.line, c + 1, "'" + row.fields[c] + "' is not a boolean");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": " + e.what());
  }
}

}  // namespace

IndicatorTree parse_indicators(const CsvTable& t) {
  require_header(t, {"id", "name", "level", "parent_id", "bonus", "local_weight", "global_weight"}, 2);
  std::vector<IndicatorNode> nodes;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    IndicatorNode n;
    n.id = row_id(t, row, seen);
    n.name = std::string(trim(row.fields[1]));
    const auto level = parse_level(row.fields[2]);
    if (!level) fail_at(ErrorKind::InvalidInput, t.source, row.line, 3, "unknown level '" + row.fields[2] + "'");
    n.level = *level;
    if (auto parent = trim(row.fields[3]); !parent.empty()) n.parent_id = std::string(parent);
    n.bonus = bool_cell(t, row, 4);
    n.local_weight = weight_cell(t, row, 5);
    n.global_weight = weight_cell(t, row, 6);
    nodes.push_back(std::move(n));
  }
  return IndicatorTree(std::move(nodes));
}

IndicatorTree read_indicators(const std::filesystem::path& path) { return parse_indicators(read_csv(path)); }

std::string write_indicators(const IndicatorTree& tree) {
  std::vector<std::vector<std::string>> rows;
  auto weight = [](const std::optional<double>& w) { return w ? format_shortest(*w) : std::string(); };
  for (const auto& n : tree.nodes()) {
    rows.push_back({n.id, n.name, std::string(to_string(n.level)), n.parent_id.value_or(""),
                    n.bonus ? "true" : "false", weight(n.local_weight), weight(n.global_weight)});
  }
  return write_csv({"id", "name", "level", "parent_id", "bonus", "local_weight", "global_weight"}, rows);
}

std::vector<ExpertProfile> parse_experts(const CsvTable& t) {
  require_header(t, {"id", "group", "familiarity", "basis_theory", "basis_practice", "basis_peer", "basis_intuition"});
  std::vector<ExpertProfile> out;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    ExpertProfile p;
    p.id = row_id(t, row, seen);
    const auto group = parse_identity_group(row.fields[1]);
    if (!group) fail_at(ErrorKind::InvalidInput, t.source, row.line, 2, "unknown group '" + row.fields[1] + "'");
    p.group = *group;
    const auto fam = parse_familiarity(row.fields[2]);
    if (!fam) fail_at(ErrorKind::InvalidInput, t.source, row.line, 3, "unknown familiarity '" + row.fields[2] + "'");
    p.familiarity = *fam;
    for (std::size_t b = 0; b < kBasisCount; ++b) {
      const auto impact = parse_impact(row.fields[3 + b]);
      if (!impact) {
        fail_at(ErrorKind::InvalidInput, t.source, row.line, 4 + b, "unknown impact '" + row.fields[3 + b] + "'");
      }
      p.judgment_basis[b] = *impact;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ExpertProfile> read_experts(const std::filesystem::path& path) { return parse_experts(read_csv(path)); }

RatingRound parse_ratings(const CsvTable& t, const RatingsOptions& options) {
  auto ids = id_columns(t, "expert_id");
  if (ids.empty()) fail_at(ErrorKind::Schema, t.source, 1, 0, "no indicator columns");
  if (options.known_indicators) {
    for (std::size_t c = 0; c < ids.size(); ++c) {
      if (!options.known_indicators->contains(ids[c])) {
        fail_at(ErrorKind::Schema, t.source, 1, c + 2, "unknown indicator column '" + ids[c] + "'");
      }
    }
  }
  std::vector<ExpertRatings> rows;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    ExpertRatings er;
    er.expert_id = row_id(t, row, seen);
    bool blank = false;
    for (std::size_t c = 1; c < row.fields.size(); ++c) blank = blank || trim(row.fields[c]).empty();
    if (!blank) {
      std::vector<int> values;
      for (std::size_t c = 1; c < row.fields.size(); ++c) {
        values.push_back(integer_cell(t, row, c, 1, options.scale_max,
                                      "expert '" + er.expert_id + "', indicator '" + ids[c - 1] + "'"));
      }
      er.ratings = std::move(values);
    }
    rows.push_back(std::move(er));
  }
  const std::size_t distributed = options.distributed.value_or(rows.size());
  try {
    return RatingRound(options.round_no, options.scale_max, distributed, std::move(ids), std::move(rows));
  } catch (const Error& e) {
    fail(e.kind(), t.source + ": " + e.what());
  }
}

RatingRound read_ratings(const std::filesystem::path& path, const RatingsOptions& options) {
  return parse_ratings(read_csv(path), options);
}

ConsumerResponses parse_responses(const CsvTable& t, const Instrument& instrument) {
  const auto cols = id_columns(t, "respondent_id");
  std::set<std::string> known;
  for (const auto& q : instrument.questions) known.insert(q.id);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (!known.contains(cols[c])) fail_at(ErrorKind::Schema, t.source, 1, c + 2, "unknown question column '" + cols[c] + "'");
  }
  for (const auto& q : instrument.questions) {
    if (std::find(cols.begin(), cols.end(), q.id) == cols.end()) {
      fail_at(ErrorKind::Schema, t.source, 1, 0, "missing question column '" + q.id + "'");
    }
  }
  ConsumerResponses out;
  out.question_ids = cols;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    const auto id = row_id(t, row, seen);
    std::vector<std::optional<int>> answers;
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      if (trim(row.fields[c]).empty()) {
        answers.emplace_back();
      } else {
        answers.emplace_back(integer_cell(t, row, c, kAnswerMin, kAnswerMax,
                                          "respondent '" + id + "', question '" + cols[c - 1] + "'"));
      }
    }
    out.respondent_ids.push_back(id);
    out.answers.push_back(std::move(answers));
  }
  return out;
}

ConsumerResponses read_responses(const std::filesystem::path& path, const Instrument& instrument) {
  return parse_responses(read_csv(path), instrument);
}

BonusRatings parse_expert_bonus(const CsvTable& t, const Instrument& instrument) {
  const auto cols = id_columns(t, "expert_id");
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const bool known = std::any_of(instrument.bonus_indicators.begin(), instrument.bonus_indicators.end(),
                                   [&](const BonusIndicator& b) { return b.id == cols[c]; });
    if (!known) fail_at(ErrorKind::Schema, t.source, 1, c + 2, "unknown bonus indicator column '" + cols[c] + "'");
  }
  BonusRatings out;
  out.indicator_ids = cols;
  out.ratings = Matrix<int>(t.rows.size(), cols.size());
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    out.expert_ids.push_back(row_id(t, row, seen));
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      out.ratings(r, c - 1) = integer_cell(t, row, c, kAnswerMin, kAnswerMax,
                                           "expert '" + out.expert_ids.back() + "', indicator '" + cols[c - 1] + "'");
    }
  }
  return out;
}

BonusRatings read_expert_bonus(const std::filesystem::path& path, const Instrument& instrument) {
  return parse_expert_bonus(read_csv(path), instrument);
}

PairwiseMatrix parse_pairwise(const CsvTable& t) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    std::string id(trim(t.header[c]));
    if (id.empty() || !seen.insert(id).second) {
      fail_at(ErrorKind::Schema, t.source, 1, c + 1, "empty or duplicate id '" + id + "'");
    }
    ids.push_back(std::move(id));
  }
  if (t.rows.size() != ids.size()) {
    fail_at(ErrorKind::Schema, t.source, 1, 0,
            "matrix has " + std::to_string(t.rows.size()) + " rows for " + std::to_string(ids.size()) + " ids");
  }
  Matrix<double> m(ids.size(), ids.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (trim(row.fields[0]) != ids[r]) {
      fail_at(ErrorKind::Schema, t.source, row.line, 1,
              "row id '" + row.fields[0] + "' does not match column id '" + ids[r] + "'");
    }
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      const std::string cell(trim(row.fields[c]));
      std::optional<double> value;
      if (const auto slash = cell.find('/'); slash != std::string::npos) {
        const auto num = parse_real(std::string_view(cell).substr(0, slash));
        const auto den = parse_real(std::string_view(cell).substr(slash + 1));
        if (num && den && *den != 0.0) value = *num / *den;
      } else {
        value = parse_real(cell);
      }
      if (!value) fail_at(ErrorKind::InvalidInput, t.source, row.line, c + 1, "'" + cell + "' is not a number or fraction");
      m(r, c - 1) = *value;
    }
  }
  try {
    return PairwiseMatrix(std::move(ids), std::move(m));
  } catch (const Error& e) {
    fail(e.kind(), t.source + ": " + e.what());
  }
}

PairwiseMatrix read_pairwise(const std::filesystem::path& path) { return parse_pairwise(read_csv(path)); }

ImportanceRatings parse_importance(const CsvTable& t) {
  ImportanceRatings out;
  out.item_ids = id_columns(t, "rater_id");
  if (out.item_ids.empty()) fail_at(ErrorKind::Schema, t.source, 1, 0, "no item columns");
  out.ratings = Matrix<int>(t.rows.size(), out.item_ids.size());
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    out.rater_ids.push_back(row_id(t, row, seen));
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      out.ratings(r, c - 1) = integer_cell(t, row, c, 1, 7,
                                           "rater '" + out.rater_ids.back() + "', item '" + out.item_ids[c - 1] + "'");
    }
  }
  return out;
}

ImportanceRatings read_importance(const std::filesystem::path& path) { return parse_importance(read_csv(path)); }

AuthorityTables read_authority_tables(const std::filesystem::path& path) {
  const auto j = read_json(path);
  AuthorityTables tables;
  try {
    if (j.contains("judgment")) {
      const std::array<const char*, kBasisCount> keys{"theory", "practice", "peer", "intuition"};
      for (std::size_t b = 0; b < kBasisCount; ++b) {
        if (!j["judgment"].contains(keys[b])) continue;
        const auto row = j["judgment"][keys[b]].get<std::vector<double>>();
        if (row.size() != kImpactCount) fail(ErrorKind::Schema, path.string() + ": judgment." + keys[b] + " needs 3 values");
        for (std::size_t i = 0; i < kImpactCount; ++i) tables.judgment[b][i] = row[i];
      }
    }
    if (j.contains("familiarity")) {
      const auto row = j["familiarity"].get<std::vector<double>>();
      if (row.size() != kFamiliarityCount) fail(ErrorKind::Schema, path.string() + ": familiarity needs 5 values");
      for (std::size_t i = 0; i < kFamiliarityCount; ++i) tables.familiarity[i] = row[i];
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": " + e.what());
  }
  return tables;
}

ScreeningThresholds read_thresholds(const std::filesystem::path& path) {
  const auto j = read_json(path);
  try {
    return ScreeningThresholds(j.at("mean_floor").get<double>(), j.at("fsf_floor").get<double>(),
                               j.at("cv_ceiling").get<double>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": " + e.what());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace stage
