#include "stage/report.hpp"

#include <algorithm>

#include "stage/csv.hpp"
#include "stage/text.hpp"

namespace stage {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormatTag = "stage-report";
constexpr int kFormatVersion = 1;

void put(ojson& obj, const std::string& key, double value, int places) {
  obj[key] = value;
  obj[key + "_display"] = format_fixed(value, places);
}

void put(ojson& obj, const std::string& key, const std::optional<double>& value, int places) {
  if (value) {
    put(obj, key, *value, places);
  } else {
    obj[key] = nullptr;
    obj[key + "_display"] = "-";
  }
}

std::string display(const std::optional<double>& v, int places) { return v ? format_fixed(*v, places) : "-"; }

std::optional<double> opt_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

ojson round_json(const RoundSection& rs, const DisplayOptions& d) {
  const auto& c = rs.consensus;
  ojson o;
  o["round"] = c.round_no;
  o["scale_max"] = c.scale_max;
  o["distributed"] = c.distributed;
  o["returned"] = c.returned;
  put(o, "positivity", c.positivity, d.ratio_places);
  put(o, "ca", c.ca, d.coefficient_places);
  put(o, "cs", c.cs, d.coefficient_places);
  put(o, "cr", c.cr, d.coefficient_places);
  put(o, "kendall_w", c.kendall_w, d.coefficient_places);
  o["tie_corrected"] = c.tie_corrected;
  o["indicators"] = ojson::array();
  for (const auto& [id, s] : c.indicators) {
    ojson row;
    row["id"] = id;
    row["n"] = s.n;
    put(row, "mean", s.mean, d.coefficient_places);
    put(row, "sd", s.sd, d.coefficient_places);
    put(row, "cv", s.cv, d.coefficient_places);
    put(row, "full_score_freq", s.full_score_freq, d.coefficient_places);
    o["indicators"].push_back(std::move(row));
  }
  if (rs.screening) {
    const auto& s = *rs.screening;
    ojson sc;
    sc["derived"] = s.derived;
    ojson th;
    put(th, "mean_floor", s.thresholds.mean_floor(), d.coefficient_places);
    put(th, "fsf_floor", s.thresholds.fsf_floor(), d.coefficient_places);
    put(th, "cv_ceiling", s.thresholds.cv_ceiling(), d.coefficient_places);
    sc["thresholds"] = std::move(th);
    sc["retained"] = s.outcome.retained;
    sc["dropped"] = ojson::array();
    for (const auto& dr : s.outcome.dropped) {
      ojson x;
      x["id"] = dr.id;
      x["reasons"] = dr.reasons;
      sc["dropped"].push_back(std::move(x));
    }
    o["screening"] = std::move(sc);
  } else {
    o["screening"] = nullptr;
  }
  return o;
}

ojson weights_json(const WeightTable& w, const DisplayOptions& d) {
  ojson o;
  o["method"] = std::string(to_string(w.method));
  o["nodes"] = ojson::array();
  for (const auto& [id, nw] : w.nodes) {
    ojson row;
    row["id"] = id;
    put(row, "local", nw.local, d.coefficient_places);
    put(row, "global", nw.global, d.coefficient_places);
    o["nodes"].push_back(std::move(row));
  }
  o["matrices"] = ojson::array();
  for (const auto& m : w.matrices) {
    ojson row;
    row["group"] = m.group;
    row["n"] = m.n;
    put(row, "lambda_max", m.lambda_max, d.coefficient_places);
    put(row, "ci", m.ci, d.coefficient_places);
    put(row, "cr", m.cr, d.coefficient_places);
    row["acceptable"] = m.acceptable;
    o["matrices"].push_back(std::move(row));
  }
  return o;
}

ojson reliability_json(const ReliabilityTable& t, const DisplayOptions& d) {
  ojson o;
  o["respondents_used"] = t.respondents_used;
  o["excluded_respondents"] = t.excluded_respondents;
  put(o, "total_alpha", t.total_alpha, d.coefficient_places);
  o["total_error"] = t.total_error;
  o["indices"] = ojson::array();
  for (const auto& ir : t.indices) {
    ojson x;
    x["id"] = ir.index_id;
    put(x, "alpha", ir.alpha, d.coefficient_places);
    x["error"] = ir.error;
    x["questions"] = ojson::array();
    for (const auto& q : ir.questions) {
      ojson y;
      y["id"] = q.question_id;
      put(y, "citc", q.citc, d.coefficient_places);
      put(y, "alpha_if_deleted", q.alpha_if_deleted, d.coefficient_places);
      y["flag_low_citc"] = q.flag_low_citc;
      y["review"] = q.review;
      y["note"] = q.note;
      x["questions"].push_back(std::move(y));
    }
    o["indices"].push_back(std::move(x));
  }
  return o;
}

ojson validity_json(const ValidityTable& t, const DisplayOptions& d) {
  ojson o;
  o["relevance_floor"] = t.relevance_floor;
  o["raters"] = t.raters;
  o["items"] = ojson::array();
  for (const auto& it : t.items) {
    ojson x;
    x["id"] = it.item_id;
    put(x, "importance_mean", it.importance_mean, d.ratio_places);
    put(x, "i_cvi", it.i_cvi, d.ratio_places);
    x["pass"] = it.pass;
    o["items"].push_back(std::move(x));
  }
  put(o, "s_cvi", t.s_cvi, d.ratio_places);
  o["s_cvi_pass"] = t.s_cvi_pass;
  return o;
}

ojson score_json(const ScoreCard& s, const DisplayOptions& d) {
  ojson o;
  o["respondents"] = s.respondent_count;
  o["imputed_respondents"] = s.imputed_respondents;
  o["dimensions"] = ojson::array();
  for (const auto& dim : s.dimensions) {
    ojson x;
    x["id"] = dim.id;
    put(x, "weight", dim.weight, d.coefficient_places);
    put(x, "score", dim.score, d.ratio_places);
    o["dimensions"].push_back(std::move(x));
  }
  put(o, "core_composite", s.core_composite, d.ratio_places);
  put(o, "bonus", s.bonus, d.ratio_places);
  put(o, "bonus_cap", s.bonus_cap, d.ratio_places);
  put(o, "final", s.final_score, d.ratio_places);
  put(o, "final_renormalized", s.final_renormalized, d.ratio_places);
  return o;
}

// ---------------------------------------------------------------------------

RoundSection round_from_json(const nlohmann::json& j) {
  RoundSection rs;
  auto& c = rs.consensus;
  c.round_no = j.at("round").get<int>();
  c.scale_max = j.at("scale_max").get<int>();
  c.distributed = j.at("distributed").get<std::size_t>();
  c.returned = j.at("returned").get<std::size_t>();
  c.positivity = j.at("positivity").get<double>();
  c.ca = j.at("ca").get<double>();
  c.cs = j.at("cs").get<double>();
  c.cr = j.at("cr").get<double>();
  c.kendall_w = j.at("kendall_w").get<double>();
  c.tie_corrected = j.at("tie_corrected").get<bool>();
  for (const auto& row : j.at("indicators")) {
    IndicatorStats s;
    s.n = row.at("n").get<std::size_t>();
    s.mean = row.at("mean").get<double>();
    s.sd = row.at("sd").get<double>();
    s.cv = row.at("cv").get<double>();
    s.full_score_freq = row.at("full_score_freq").get<double>();
    c.indicators.emplace(row.at("id").get<std::string>(), s);
  }
  if (j.contains("screening") && !j["screening"].is_null()) {
    const auto& sc = j["screening"];
    const auto& th = sc.at("thresholds");
    ScreeningSection s{ScreeningThresholds(th.at("mean_floor").get<double>(), th.at("fsf_floor").get<double>(),
                                           th.at("cv_ceiling").get<double>()),
                       sc.at("derived").get<bool>(),
                       {}};
    s.outcome.retained = sc.at("retained").get<std::vector<std::string>>();
    for (const auto& dr : sc.at("dropped")) {
      s.outcome.dropped.push_back({dr.at("id").get<std::string>(), dr.at("reasons").get<std::vector<std::string>>()});
    }
    rs.screening = std::move(s);
  }
  return rs;
}

WeightTable weights_from_json(const nlohmann::json& j) {
  WeightTable w;
  const auto method = parse_weight_method(j.at("method").get<std::string>());
  if (!method) fail(ErrorKind::Schema, "unknown weight method '" + j.at("method").get<std::string>() + "'");
  w.method = *method;
  for (const auto& row : j.at("nodes")) {
    w.nodes[row.at("id").get<std::string>()] = NodeWeight{row.at("local").get<double>(), opt_double(row, "global")};
  }
  for (const auto& row : j.at("matrices")) {
    w.matrices.push_back({row.at("group").get<std::string>(), row.at("n").get<std::size_t>(),
                          row.at("lambda_max").get<double>(), row.at("ci").get<double>(), row.at("cr").get<double>(),
                          row.at("acceptable").get<bool>()});
  }
  return w;
}

ReliabilityTable reliability_from_json(const nlohmann::json& j) {
  ReliabilityTable t;
  t.respondents_used = j.at("respondents_used").get<std::size_t>();
  t.excluded_respondents = j.at("excluded_respondents").get<std::vector<std::string>>();
  t.total_alpha = opt_double(j, "total_alpha");
  t.total_error = j.at("total_error").get<std::string>();
  for (const auto& x : j.at("indices")) {
    IndexReliability ir;
    ir.index_id = x.at("id").get<std::string>();
    ir.alpha = opt_double(x, "alpha");
    ir.error = x.at("error").get<std::string>();
    for (const auto& y : x.at("questions")) {
      ir.questions.push_back({y.at("id").get<std::string>(), opt_double(y, "citc"), opt_double(y, "alpha_if_deleted"),
                              y.at("flag_low_citc").get<bool>(), y.at("review").get<bool>(),
                              y.at("note").get<std::string>()});
    }
    t.indices.push_back(std::move(ir));
  }
  return t;
}

ValidityTable validity_from_json(const nlohmann::json& j) {
  ValidityTable t;
  t.relevance_floor = j.at("relevance_floor").get<int>();
  t.raters = j.at("raters").get<std::size_t>();
  for (const auto& x : j.at("items")) {
    t.items.push_back({x.at("id").get<std::string>(), x.at("importance_mean").get<double>(),
                       x.at("i_cvi").get<double>(), x.at("pass").get<bool>()});
  }
  t.s_cvi = j.at("s_cvi").get<double>();
  t.s_cvi_pass = j.at("s_cvi_pass").get<bool>();
  return t;
}

ScoreCard score_from_json(const nlohmann::json& j) {
  ScoreCard s;
  s.respondent_count = j.at("respondents").get<std::size_t>();
  s.imputed_respondents = j.at("imputed_respondents").get<std::vector<std::string>>();
  for (const auto& x : j.at("dimensions")) {
    s.dimensions.push_back({x.at("id").get<std::string>(), x.at("weight").get<double>(), x.at("score").get<double>()});
  }
  s.core_composite = j.at("core_composite").get<double>();
  s.bonus = j.at("bonus").get<double>();
  s.bonus_cap = j.at("bonus_cap").get<double>();
  s.final_score = j.at("final").get<double>();
  s.final_renormalized = j.at("final_renormalized").get<double>();
  return s;
}

// ---------------------------------------------------------------------------
// markdown

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string md_rule(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += "---|";
  return out + "\n";
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += sep;
    out += xs[i];
  }
  return out;
}

std::string markdown(const ReportBundle& b, const DisplayOptions& d) {
  const int cp = d.coefficient_places;
  const int rp = d.ratio_places;
  std::string out = "# STAGE report\n";

  out += "\n## Delphi rounds\n\n";
  if (b.rounds.empty()) {
    out += "_none_\n";
  } else {
    out += md_row({"Round", "Positive coefficient", "Ca", "Cs", "Cr", "Kendall's W"});
    out += md_rule(6);
    for (const auto& rs : b.rounds) {
      const auto& c = rs.consensus;
      out += md_row({std::to_string(c.round_no), format_fixed(c.positivity, rp), format_fixed(c.ca, cp),
                     format_fixed(c.cs, cp), format_fixed(c.cr, cp), format_fixed(c.kendall_w, cp)});
    }
    for (const auto& rs : b.rounds) {
      const auto& c = rs.consensus;
      out += "\n### Round " + std::to_string(c.round_no) + " indicators\n\n";
      out += md_row({"Indicator", "n", "Mean", "SD", "CV", "Full-score frequency"});
      out += md_rule(6);
      for (const auto& [id, s] : c.indicators) {
        out += md_row({id, std::to_string(s.n), format_fixed(s.mean, cp), format_fixed(s.sd, cp),
                       format_fixed(s.cv, cp), format_fixed(s.full_score_freq, cp)});
      }
      if (rs.screening) {
        const auto& s = *rs.screening;
        out += "\n#### Round " + std::to_string(c.round_no) + " screening (" +
               (s.derived ? "derived" : "supplied") + " thresholds)\n\n";
        out += "- mean floor: " + format_fixed(s.thresholds.mean_floor(), cp) + "\n";
        out += "- full-score frequency floor: " + format_fixed(s.thresholds.fsf_floor(), cp) + "\n";
        out += "- CV ceiling: " + format_fixed(s.thresholds.cv_ceiling(), cp) + "\n";
        out += "- retained (" + std::to_string(s.outcome.retained.size()) + "): " + join(s.outcome.retained, ", ") + "\n";
        out += "\n" + md_row({"Dropped indicator", "Failed criteria"}) + md_rule(2);
        for (const auto& dr : s.outcome.dropped) out += md_row({dr.id, join(dr.reasons, ", ")});
      }
    }
  }

  out += "\n## Weights\n\n";
  if (!b.weights) {
    out += "_none_\n";
  } else {
    out += "Method: " + std::string(to_string(b.weights->method)) + "\n\n";
    out += md_row({"Indicator", "Local weight", "Global weight"}) + md_rule(3);
    for (const auto& [id, w] : b.weights->nodes) {
      out += md_row({id, format_fixed(w.local, cp), display(w.global, cp)});
    }
    if (!b.weights->matrices.empty()) {
      out += "\n" + md_row({"Sibling group", "n", "lambda_max", "CI", "CR", "CR < 0.1"}) + md_rule(6);
      for (const auto& m : b.weights->matrices) {
        out += md_row({m.group, std::to_string(m.n), format_fixed(m.lambda_max, cp), format_fixed(m.ci, cp),
                       format_fixed(m.cr, cp), yes_no(m.acceptable)});
      }
    }
  }

  out += "\n## Reliability\n\n";
  if (!b.reliability) {
    out += "_none_\n";
  } else {
    const auto& t = *b.reliability;
    out += "Respondents used: " + std::to_string(t.respondents_used) + "; excluded for missing answers: " +
           (t.excluded_respondents.empty() ? "none" : join(t.excluded_respondents, ", ")) + "\n\n";
    out += md_row({"Index", "Coefficient value", "No.", "Corrected item-total correlation",
                   "Coefficient after deleting the item", "Flag"});
    out += md_rule(6);
    for (const auto& ir : t.indices) {
      bool first = true;
      for (const auto& q : ir.questions) {
        std::string flag = q.flag_low_citc ? "CITC < 0.3" : (q.review ? "review" : "");
        out += md_row({first ? ir.index_id : "", first ? display(ir.alpha, cp) : "", q.question_id,
                       display(q.citc, cp), display(q.alpha_if_deleted, cp), flag});
        first = false;
      }
    }
    out += md_row({"Total", display(t.total_alpha, cp), "", "", "", ""});
  }

  out += "\n## Content validity\n\n";
  if (!b.validity) {
    out += "_none_\n";
  } else {
    const auto& t = *b.validity;
    out += "Raters: " + std::to_string(t.raters) + "; relevant when rated >= " + std::to_string(t.relevance_floor) +
           "\n\n";
    out += md_row({"Item", "Importance score", "I-CVI", "I-CVI >= 0.78"}) + md_rule(4);
    for (const auto& it : t.items) {
      out += md_row({it.item_id, format_fixed(it.importance_mean, rp), format_fixed(it.i_cvi, rp), yes_no(it.pass)});
    }
    out += md_row({"Total", "S-CVI", format_fixed(t.s_cvi, rp), yes_no(t.s_cvi_pass)});
  }

  out += "\n## Score\n\n";
  if (!b.score) {
    out += "_none_\n";
  } else {
    const auto& s = *b.score;
    out += md_row({"Dimension", "Weight", "Score"}) + md_rule(3);
    for (const auto& dim : s.dimensions) {
      out += md_row({dim.id, format_fixed(dim.weight, cp), format_fixed(dim.score, rp)});
    }
    out += "\n- respondents: " + std::to_string(s.respondent_count) + "\n";
    out += "- imputed respondents: " +
           (s.imputed_respondents.empty() ? std::string("none") : join(s.imputed_respondents, ", ")) + "\n";
    out += "- core composite: " + format_fixed(s.core_composite, rp) + "\n";
    out += "- expert bonus: " + format_fixed(s.bonus, rp) + " of " + format_fixed(s.bonus_cap, rp) + "\n";
    out += "- final: " + format_fixed(s.final_score, rp) + "\n";
    out += "- final (0-100): " + format_fixed(s.final_renormalized, rp) + "\n";
  }
  return out;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  const auto t = normalize_token(text);
  if (t == "json") return ReportFormat::Json;
  if (t == "markdown" || t == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

const RoundSection* ReportBundle::find_round(int round_no) const {
  for (const auto& r : rounds) {
    if (r.consensus.round_no == round_no) return &r;
  }
  return nullptr;
}

ojson report_to_json(const ReportBundle& b, const DisplayOptions& d) {
  ojson o;
  o["format"] = kFormatTag;
  o["version"] = kFormatVersion;
  o["rounds"] = ojson::array();
  for (const auto& r : b.rounds) o["rounds"].push_back(round_json(r, d));
  o["weights"] = b.weights ? weights_json(*b.weights, d) : ojson(nullptr);
  o["reliability"] = b.reliability ? reliability_json(*b.reliability, d) : ojson(nullptr);
  o["validity"] = b.validity ? validity_json(*b.validity, d) : ojson(nullptr);
  o["score"] = b.score ? score_json(*b.score, d) : ojson(nullptr);
  return o;
}

ReportBundle report_from_json(const nlohmann::json& j, const std::string& source) {
  try {
    if (j.value("format", std::string()) != kFormatTag) fail(ErrorKind::Schema, source + ": not a stage report");
    ReportBundle b;
    for (const auto& r : j.at("rounds")) b.rounds.push_back(round_from_json(r));
    if (!j.at("weights").is_null()) b.weights = weights_from_json(j["weights"]);
    if (!j.at("reliability").is_null()) b.reliability = reliability_from_json(j["reliability"]);
    if (!j.at("validity").is_null()) b.validity = validity_from_json(j["validity"]);
    if (!j.at("score").is_null()) b.score = score_from_json(j["score"]);
    return b;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, source + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Schema) throw;
    fail(ErrorKind::Schema, source + ": " + e.what());
  }
}

ReportBundle read_report(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": " + e.what());
  }
  return report_from_json(j, path.string());
}

void merge_report(ReportBundle& into, const ReportBundle& from) {
  for (const auto& r : from.rounds) {
    auto it = std::find_if(into.rounds.begin(), into.rounds.end(), [&](const RoundSection& x) {
      return x.consensus.round_no == r.consensus.round_no;
    });
    if (it == into.rounds.end()) into.rounds.push_back(r);
    else *it = r;
  }
  std::sort(into.rounds.begin(), into.rounds.end(), [](const RoundSection& a, const RoundSection& b) {
    return a.consensus.round_no < b.consensus.round_no;
  });
  if (from.weights) into.weights = from.weights;
  if (from.reliability) into.reliability = from.reliability;
  if (from.validity) into.validity = from.validity;
  if (from.score) into.score = from.score;
}

std::string render_report(const ReportBundle& bundle, ReportFormat format, const DisplayOptions& display) {
  if (format == ReportFormat::Markdown) return markdown(bundle, display);
  return report_to_json(bundle, display).dump(2) + "\n";
}

}  // namespace stage
