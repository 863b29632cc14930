// Command-line front end for the STAGE toolkit.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stage/consensus.hpp"
#include "stage/csv.hpp"
#include "stage/forms.hpp"
#include "stage/inputs.hpp"
#include "stage/pipeline.hpp"
#include "stage/report.hpp"

namespace {

struct GlobalOptions {
  std::string out;
  std::string format = "json";
  std::optional<int> precision;
};

stage::DisplayOptions display_options(const GlobalOptions& g) {
  if (g.precision) return stage::DisplayOptions::uniform(*g.precision);
  return {};
}

stage::ReportFormat report_format(const GlobalOptions& g) {
  const auto f = stage::parse_report_format(g.format);
  if (!f) stage::fail(stage::ErrorKind::InvalidInput, "unknown format '" + g.format + "'");
  return *f;
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    stage::write_text_file(g.out, text);
  }
}

void emit_bundle(const GlobalOptions& g, const stage::ReportBundle& bundle) {
  emit(g, stage::render_report(bundle, report_format(g), display_options(g)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAGE instrument toolkit: Delphi round analytics, AHP weighting, reliability, validity and scoring"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--out", global.out, "Output file (default: stdout)");
  app.add_option("--format", global.format, "json or markdown")->check(CLI::IsMember({"json", "markdown", "md"}));
  app.add_option("--precision", global.precision, "Decimal places for every display value")->check(CLI::Range(0, 15));

  // round-stats
  auto* round_stats = app.add_subcommand("round-stats", "Positivity, authority, Kendall's W and indicator statistics");
  std::string ratings_path, experts_path, indicators_path, tables_path;
  int scale_max = 5;
  int round_no = 1;
  std::optional<std::size_t> distributed;
  bool no_tie_correction = false;
  round_stats->add_option("--ratings", ratings_path, "ratings_roundK.csv")->required();
  round_stats->add_option("--experts", experts_path, "experts.csv")->required();
  round_stats->add_option("--scale-max", scale_max, "Importance scale ceiling")->check(CLI::PositiveNumber);
  round_stats->add_option("--round", round_no, "Round number")->check(CLI::PositiveNumber);
  round_stats->add_option("--distributed", distributed, "Questionnaires sent (default: rows in ratings file)");
  round_stats->add_option("--indicators", indicators_path, "indicators.csv restricting the rating columns");
  round_stats->add_option("--tables", tables_path, "JSON overriding the Ca/Cs lookup tables");
  round_stats->add_flag("--no-tie-correction", no_tie_correction, "Uncorrected Kendall's W");

  // screen
  auto* screen = app.add_subcommand("screen", "Apply the mean/full-score/CV screening rules");
  std::string stats_path, thresholds_path;
  std::optional<int> screen_round;
  screen->add_option("--stats", stats_path, "Report JSON from round-stats")->required();
  screen->add_option("--thresholds", thresholds_path, "JSON with mean_floor, fsf_floor, cv_ceiling");
  screen->add_option("--round", screen_round, "Only screen this round");

  // weights
  auto* weights = app.add_subcommand("weights", "AHP / expert-scoring weights composed down the hierarchy");
  std::string tree_path, importance_path, method_name = "combined";
  std::vector<std::string> pairwise_paths;
  std::optional<int> importance_round;
  weights->add_option("--tree", tree_path, "indicators.csv")->required();
  weights->add_option("--pairwise", pairwise_paths, "Pairwise matrix CSVs")->delimiter(',');
  weights->add_option("--importance", importance_path, "Report JSON whose round means drive scoring weights");
  weights->add_option("--importance-round", importance_round, "Round in --importance (default: last)");
  weights->add_option("--method", method_name, "ahp, scoring or combined")
      ->check(CLI::IsMember({"ahp", "scoring", "combined"}));

  // reliability
  auto* reliability = app.add_subcommand("reliability", "Cronbach's alpha, CITC and alpha-if-deleted");
  std::string responses_path, instrument_name = "default";
  reliability->add_option("--responses", responses_path, "responses.csv")->required();
  reliability->add_option("--instrument", instrument_name, "Instrument (only 'default')")
      ->check(CLI::IsMember({"default"}));

  // validity
  auto* validity = app.add_subcommand("validity", "I-CVI and S-CVI from 1-7 importance ratings");
  std::string validity_path;
  int relevance_floor = stage::kDefaultRelevanceFloor;
  validity->add_option("--importance", validity_path, "importance.csv")->required();
  validity->add_option("--relevance-floor", relevance_floor, "Lowest rating counted as relevant")
      ->check(CLI::Range(1, 7));

  // score
  auto* score = app.add_subcommand("score", "Composite score from consumer answers and expert bonus");
  std::string score_responses, bonus_path, weights_path;
  double cap = stage::kDefaultBonusCap;
  score->add_option("--responses", score_responses, "responses.csv")->required();
  score->add_option("--bonus", bonus_path, "expert_bonus.csv");
  score->add_option("--weights", weights_path, "Report JSON from weights")->required();
  score->add_option("--cap", cap, "Bonus cap")->check(CLI::PositiveNumber);

  // form
  auto* form = app.add_subcommand("form", "Next-round consultation sheet carrying previous means");
  std::string form_stats, form_tree;
  std::optional<int> form_from_round, form_round;
  std::vector<std::string> retain;
  form->add_option("--stats", form_stats, "Report JSON with the previous round")->required();
  form->add_option("--tree", form_tree, "indicators.csv supplying indicator names");
  form->add_option("--from-round", form_from_round, "Previous round (default: last in --stats)");
  form->add_option("--round", form_round, "Round the form is for (default: previous + 1)");
  form->add_option("--retain", retain, "Indicator ids (default: screening verdicts)")->delimiter(',');

  // report
  auto* report = app.add_subcommand("report", "Merge report JSON files and render them");
  std::vector<std::string> report_inputs;
  report->add_option("--in", report_inputs, "Report JSON files, later files win")->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a JSON config");
  std::string config_path;
  pipeline->add_option("--config", config_path, "Pipeline config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*round_stats) {
      stage::RatingsOptions opt;
      opt.round_no = round_no;
      opt.scale_max = scale_max;
      opt.distributed = distributed;
      if (!indicators_path.empty()) {
        std::set<std::string> ids;
        const auto pool = stage::read_indicators(indicators_path);
        for (const auto& n : pool.nodes()) ids.insert(n.id);
        opt.known_indicators = std::move(ids);
      }
      const auto round = stage::read_ratings(ratings_path, opt);
      const auto experts = stage::read_experts(experts_path);
      const auto tables = tables_path.empty() ? stage::AuthorityTables{} : stage::read_authority_tables(tables_path);
      stage::ReportBundle bundle;
      bundle.rounds.push_back({stage::analyze_round(round, experts, tables, !no_tie_correction), std::nullopt});
      emit_bundle(global, bundle);
    } else if (*screen) {
      auto bundle = stage::read_report(stats_path);
      const std::optional<stage::ScreeningThresholds> fixed =
          thresholds_path.empty() ? std::nullopt : std::optional(stage::read_thresholds(thresholds_path));
      if (bundle.rounds.empty()) stage::fail(stage::ErrorKind::InvalidInput, stats_path + ": no rounds to screen");
      if (screen_round && !bundle.find_round(*screen_round)) {
        stage::fail(stage::ErrorKind::InvalidInput, stats_path + ": no round " + std::to_string(*screen_round));
      }
      for (auto& rs : bundle.rounds) {
        if (screen_round && rs.consensus.round_no != *screen_round) continue;
        const auto th = fixed ? *fixed : stage::derive_thresholds(rs.consensus.indicators);
        rs.screening = stage::ScreeningSection{th, !fixed, stage::screen_indicators(rs.consensus.indicators, th)};
      }
      emit_bundle(global, bundle);
    } else if (*weights) {
      const auto tree = stage::read_indicators(tree_path);
      if (const auto problems = stage::validate_tree(tree); !problems.empty()) {
        stage::fail(stage::ErrorKind::InvalidInput, tree_path + ": " + problems.front().message);
      }
      std::vector<stage::PairwiseMatrix> matrices;
      for (const auto& p : pairwise_paths) matrices.push_back(stage::read_pairwise(p));
      const auto method = *stage::parse_weight_method(method_name);
      std::map<std::string, double> means;
      if (!importance_path.empty()) {
        const auto imp = stage::read_report(importance_path);
        if (imp.rounds.empty()) stage::fail(stage::ErrorKind::InvalidInput, importance_path + ": no rounds");
        const auto* rs = importance_round ? imp.find_round(*importance_round) : &imp.rounds.back();
        if (rs == nullptr) stage::fail(stage::ErrorKind::InvalidInput, importance_path + ": round not found");
        for (const auto& [id, s] : rs->consensus.indicators) means[id] = s.mean;
      }
      stage::ReportBundle bundle;
      bundle.weights = stage::derive_weights(tree, matrices, means, method);
      emit_bundle(global, bundle);
    } else if (*reliability) {
      const auto& instrument = stage::load_default_instrument();
      stage::ReportBundle bundle;
      bundle.reliability = stage::reliability_report(stage::read_responses(responses_path, instrument), instrument);
      emit_bundle(global, bundle);
    } else if (*validity) {
      const auto imp = stage::read_importance(validity_path);
      stage::ReportBundle bundle;
      bundle.validity = stage::validity_report(imp.ratings, imp.item_ids, relevance_floor);
      emit_bundle(global, bundle);
    } else if (*score) {
      const auto& instrument = stage::load_default_instrument();
      const auto w = stage::read_report(weights_path);
      if (!w.weights) stage::fail(stage::ErrorKind::InvalidInput, weights_path + ": no weights section");
      stage::BonusRatings bonus;
      if (!bonus_path.empty()) bonus = stage::read_expert_bonus(bonus_path, instrument);
      stage::ReportBundle bundle;
      bundle.score = stage::score_software(stage::read_responses(score_responses, instrument), bonus, instrument,
                                           *w.weights, cap);
      emit_bundle(global, bundle);
    } else if (*form) {
      const auto prev = stage::read_report(form_stats);
      if (prev.rounds.empty()) stage::fail(stage::ErrorKind::InvalidInput, form_stats + ": no rounds");
      const auto* rs = form_from_round ? prev.find_round(*form_from_round) : &prev.rounds.back();
      if (rs == nullptr) stage::fail(stage::ErrorKind::InvalidInput, form_stats + ": round not found");
      std::vector<std::string> ids = retain;
      if (ids.empty()) {
        if (!rs->screening) {
          stage::fail(stage::ErrorKind::InvalidInput, form_stats + ": no screening verdicts; pass --retain");
        }
        ids = rs->screening->outcome.retained;
      }
      const auto tree = form_tree.empty() ? stage::IndicatorTree{} : stage::read_indicators(form_tree);
      const auto sheet =
          stage::emit_round_form(rs->consensus, ids, form_round.value_or(rs->consensus.round_no + 1), tree);
      const int places = global.precision.value_or(4);
      emit(global, report_format(global) == stage::ReportFormat::Markdown
                       ? stage::render_round_form_markdown(sheet, places)
                       : stage::render_round_form_csv(sheet, places));
    } else if (*report) {
      stage::ReportBundle bundle;
      for (const auto& p : report_inputs) stage::merge_report(bundle, stage::read_report(p));
      emit_bundle(global, bundle);
    } else if (*pipeline) {
      emit_bundle(global, stage::run_pipeline(std::filesystem::path(config_path)));
    }
  } catch (const stage::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stage::exit_code(e.kind());
  }
  return 0;
}
