#include "stage/pipeline.hpp"

#include <algorithm>
#include <set>

#include "stage/csv.hpp"
#include "stage/inputs.hpp"
#include "stage/text.hpp"

namespace stage {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> opt_path(const nlohmann::json& j, const char* key,
                                              const std::filesystem::path& base) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return resolve(base, j[key].get<std::string>());
}

[[noreturn]] void missing(const std::string& stage, const std::string& what) {
  fail(ErrorKind::InvalidInput, stage + ": missing input (" + what + ")");
}

template <typename T>
const T& need(const std::optional<T>& v, const std::string& stage, const std::string& what) {
  if (!v) missing(stage, what);
  return *v;
}

}  // namespace

PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::filesystem::path& base) {
  PipelineConfig c;
  try {
    if (!j.is_object()) fail(ErrorKind::Schema, "pipeline config must be a JSON object");
    c.stages = j.value("stages", kPipelineStages);
    for (const auto& s : c.stages) {
      if (std::find(kPipelineStages.begin(), kPipelineStages.end(), s) == kPipelineStages.end()) {
        fail(ErrorKind::Schema, "unknown stage '" + s + "'");
      }
    }
    c.scale_max = j.value("scale_max", 5);
    c.correct_ties = j.value("correct_ties", true);
    c.experts = opt_path(j, "experts", base);
    c.authority_tables = opt_path(j, "authority_tables", base);
    for (const auto& r : j.value("rounds", nlohmann::json::array())) {
      RoundInput in;
      in.round_no = r.at("round").get<int>();
      in.ratings = resolve(base, r.at("ratings").get<std::string>());
      in.indicators = opt_path(r, "indicators", base);
      if (r.contains("distributed")) in.distributed = r["distributed"].get<std::size_t>();
      in.thresholds = opt_path(r, "thresholds", base);
      c.rounds.push_back(std::move(in));
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      c.weight_tree = opt_path(w, "tree", base);
      for (const auto& p : w.value("pairwise", std::vector<std::string>{})) c.pairwise.push_back(resolve(base, p));
      if (w.contains("importance_round")) c.importance_round = w["importance_round"].get<int>();
      const auto method = parse_weight_method(w.value("method", std::string("combined")));
      if (!method) fail(ErrorKind::Schema, "unknown weight method");
      c.method = *method;
    }
    if (j.contains("reliability")) {
      const auto& r = j["reliability"];
      if (r.value("instrument", std::string("default")) != "default") {
        fail(ErrorKind::Schema, "only the default instrument is supported");
      }
      c.reliability_responses = opt_path(r, "responses", base);
    }
    if (j.contains("validity")) {
      c.validity_importance = opt_path(j["validity"], "importance", base);
      c.relevance_floor = j["validity"].value("relevance_floor", 5);
    }
    if (j.contains("score")) {
      c.score_responses = opt_path(j["score"], "responses", base);
      c.score_bonus = opt_path(j["score"], "bonus", base);
      c.bonus_cap = j["score"].value("cap", 10.0);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig read_pipeline_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path.string() + ": " + e.what());
  }
  try {
    return parse_pipeline_config(j, path.parent_path());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

ReportBundle run_pipeline(const PipelineConfig& c) {
  const std::set<std::string> wanted(c.stages.begin(), c.stages.end());
  ReportBundle bundle;
  const Instrument& instrument = load_default_instrument();
  std::optional<WeightTable> weights;

  auto stage = [&](const std::string& name, auto&& body) {
    if (!wanted.contains(name)) return;
    try {
      body();
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.starts_with(name + ": ")) throw;
      fail(e.kind(), name + ": " + msg);
    }
  };

  stage("round-stats", [&] {
    if (c.rounds.empty()) missing("round-stats", "rounds");
    const auto experts = read_experts(need(c.experts, "round-stats", "experts"));
    const AuthorityTables tables = c.authority_tables ? read_authority_tables(*c.authority_tables) : AuthorityTables{};
    for (const auto& r : c.rounds) {
      RatingsOptions opt;
      opt.round_no = r.round_no;
      opt.scale_max = c.scale_max;
      opt.distributed = r.distributed;
      if (r.indicators) {
        std::set<std::string> ids;
        const auto pool = read_indicators(*r.indicators);
        for (const auto& n : pool.nodes()) ids.insert(n.id);
        opt.known_indicators = std::move(ids);
      }
      const auto round = read_ratings(r.ratings, opt);
      bundle.rounds.push_back({analyze_round(round, experts, tables, c.correct_ties), std::nullopt});
    }
  });

  stage("screen", [&] {
    if (bundle.rounds.empty()) missing("screen", "round statistics");
    for (auto& rs : bundle.rounds) {
      const auto it = std::find_if(c.rounds.begin(), c.rounds.end(),
                                   [&](const RoundInput& r) { return r.round_no == rs.consensus.round_no; });
      const bool derived = it == c.rounds.end() || !it->thresholds;
      const auto thresholds = derived ? derive_thresholds(rs.consensus.indicators) : read_thresholds(*it->thresholds);
      rs.screening = ScreeningSection{thresholds, derived, screen_indicators(rs.consensus.indicators, thresholds)};
    }
  });

  stage("weights", [&] {
    const auto tree = read_indicators(need(c.weight_tree, "weights", "tree"));
    if (auto problems = validate_tree(tree); !problems.empty()) {
      fail(ErrorKind::InvalidInput, "indicator tree: " + problems.front().message);
    }
    std::vector<PairwiseMatrix> matrices;
    for (const auto& p : c.pairwise) matrices.push_back(read_pairwise(p));
    std::map<std::string, double> means;
    if (c.method != WeightMethod::Ahp) {
      const int round_no = need(c.importance_round, "weights", "importance_round");
      const auto* rs = bundle.find_round(round_no);
      if (rs == nullptr) missing("weights", "statistics for round " + std::to_string(round_no));
      for (const auto& [id, s] : rs->consensus.indicators) means[id] = s.mean;
    }
    if (c.method != WeightMethod::Scoring && matrices.empty()) missing("weights", "pairwise");
    weights = derive_weights(tree, matrices, means, c.method);
    bundle.weights = weights;
  });

  stage("reliability", [&] {
    const auto responses = read_responses(need(c.reliability_responses, "reliability", "responses"), instrument);
    bundle.reliability = reliability_report(responses, instrument);
  });

  stage("validity", [&] {
    const auto imp = read_importance(need(c.validity_importance, "validity", "importance"));
    bundle.validity = validity_report(imp.ratings, imp.item_ids, c.relevance_floor);
  });

  stage("score", [&] {
    const auto responses = read_responses(need(c.score_responses, "score", "responses"), instrument);
    const auto& w = need(weights, "score", "weights");
    BonusRatings bonus;
    if (c.score_bonus) bonus = read_expert_bonus(*c.score_bonus, instrument);
    bundle.score = score_software(responses, bonus, instrument, w, c.bonus_cap);
  });

  return bundle;
}

ReportBundle run_pipeline(const std::filesystem::path& config_path) {
  return run_pipeline(read_pipeline_config(config_path));
}

}  // namespace stage
