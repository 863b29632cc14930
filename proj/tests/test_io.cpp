#include <filesystem>
#include <functional>
#include <fstream>
#include <set>

#include "json.hpp"
#include "check_error.hpp"
#include "oracles.hpp"
#include "stage/csv.hpp"
#include "stage/forms.hpp"
#include "stage/inputs.hpp"
#include "stage/pipeline.hpp"
#include "stage/report.hpp"
#include "stage/text.hpp"

using namespace stage;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

RatingRound ratings(const std::string& text, RatingsOptions opt = {}) {
  return parse_ratings(parse_csv(text, "ratings.csv"), opt);
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stage_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RoundConsensus sample_round() {
  RoundConsensus c;
  c.round_no = 1;
  c.distributed = 25;
  c.returned = 25;
  c.positivity = 1.0;
  c.ca = 0.8864;
  c.cs = 0.8651;
  c.cr = authority_coefficient(c.ca, c.cs);
  c.kendall_w = 0.135;
  c.indicators["a"] = {25, 4.2, 0.5, 0.5 / 4.2, 0.4};
  c.indicators["b"] = {25, 3.9, 0.6, 0.6 / 3.9, 0.2};
  c.indicators["c"] = {25, 4.8, 0.4, 0.4 / 4.8, 0.8};
  return c;
}

void collect_displays(const nlohmann::ordered_json& j, std::set<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key().ends_with("_display") && it.value().is_string() && it.value() != "-") out.insert(it.value());
      collect_displays(it.value(), out);
    }
  } else if (j.is_array()) {
    for (const auto& x : j) collect_displays(x, out);
  }
}

}  // namespace

TEST_CASE("format_fixed rounds half to even on the shortest decimal") {
  CHECK(format_fixed(0.87575, 4) == "0.8758");
  CHECK(format_fixed(0.87565, 4) == "0.8756");
  CHECK(format_fixed(0.87585, 4) == "0.8758");
  CHECK(format_fixed(0.125, 2) == "0.12");
  CHECK(format_fixed(0.135, 2) == "0.14");
  CHECK(format_fixed(2.5, 0) == "2");
  CHECK(format_fixed(0.93125, 2) == "0.93");
  CHECK(format_fixed(1.0, 2) == "1.00");
  CHECK(format_fixed(-0.0001, 2) == "0.00");
  CHECK(format_fixed(-0.061, 3) == "-0.061");
  CHECK(format_fixed(0.8461000000000001, 4) == "0.8461");
  CHECK(format_fixed(123.456, 1) == "123.5");
  CHECK(format_fixed(9.9999, 2) == "10.00");
  CHECK(format_shortest(0.1) == "0.1");
}

TEST_CASE("text helpers") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(normalize_token("Very Familiar") == "very_familiar");
  CHECK(normalize_token("social-technology researcher") == "social_technology_researcher");
  CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(parse_integer(" 42 ") == 42);
  CHECK_FALSE(parse_integer("4.5").has_value());
  CHECK(parse_real("1/3").has_value() == false);
  CHECK(parse_real("0.25") == 0.25);
}

TEST_CASE("CSV parsing") {
  const auto t = parse_csv("\xEF\xBB\xBFid,name\r\n1,\"a, \"\"quoted\"\" name\"\r\n\r\n2,\"multi\nline\"\n", "x.csv");
  CHECK(t.header == std::vector<std::string>{"id", "name"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].fields[1] == "a, \"quoted\" name");
  CHECK(t.rows[1].fields[1] == "multi\nline");
  CHECK(t.rows[1].line == 4);
  CHECK(t.column("name") == 1);
  CHECK(t.column("zzz") == 2);

  const auto msg = error_of([] { parse_csv("a,b\n1,2\n3\n", "bad.csv"); });
  CHECK(msg.find("bad.csv:3") != std::string::npos);
  CHECK_ERROR_KIND(parse_csv("a,b\n1,2\n3\n", "bad.csv"), ErrorKind::Schema);
  CHECK_ERROR_KIND(parse_csv("a\n\"open\n", "q.csv"), ErrorKind::Schema);
}

TEST_CASE("CSV writing round trips") {
  const std::vector<std::string> header{"id", "text"};
  const std::vector<std::vector<std::string>> rows{{"1", "plain"}, {"2", "with, comma"}, {"3", "say \"hi\""}};
  const auto text = write_csv(header, rows);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.starts_with("id,text\n1,plain\n2,\"with, comma\"\n"));
  const auto back = parse_csv(text, "mem");
  for (std::size_t r = 0; r < rows.size(); ++r) CHECK(back.rows[r].fields == rows[r]);
}

TEST_CASE("ratings parsing") {
  const auto r = ratings("expert_id,a,b,c\ne1,5,4,3\ne2,1,2,3\n");
  CHECK(r.indicator_ids() == std::vector<std::string>{"a", "b", "c"});
  CHECK(r.responding_matrix().rows() == 2);
  CHECK(r.responding_matrix().cols() == 3);
  CHECK(r.distributed() == 2);

  const auto msg = error_of([] { ratings("expert_id,a,b\ne1,5,4\ne2,9,3\n"); });
  CHECK(msg.find("ratings.csv:3:2") != std::string::npos);
  CHECK(msg.find("e2") != std::string::npos);
  CHECK(msg.find("'a'") != std::string::npos);
  CHECK_ERROR_KIND(ratings("expert_id,a,b\ne1,5,4\ne2,9,3\n"), ErrorKind::InvalidInput);

  const auto silent = ratings("expert_id,a,b\ne1,5,4\ne2,,\ne3,3,3\n");
  CHECK(silent.returned() == 2);
  CHECK(silent.distributed() == 3);

  CHECK_ERROR_KIND(ratings("expert_id,a,a\ne1,5,4\n"), ErrorKind::Schema);
  CHECK_ERROR_KIND(ratings("expert,a\ne1,5\n"), ErrorKind::Schema);

  RatingsOptions known;
  known.known_indicators = std::set<std::string>{"a"};
  const auto unknown = error_of([&] { ratings("expert_id,a,zz\ne1,5,4\n", known); });
  CHECK(unknown.find("zz") != std::string::npos);
  CHECK_ERROR_KIND(ratings("expert_id,a,zz\ne1,5,4\n", known), ErrorKind::Schema);

  RatingsOptions sent;
  sent.distributed = 5;
  const auto blank = ratings("expert_id,a,b\ne1,5,4\ne2,,\ne3,3,\n", sent);
  CHECK(blank.returned() == 1);
  CHECK(blank.distributed() == 5);
}

TEST_CASE("experts, responses, bonus, importance and pairwise files") {
  const auto experts = parse_experts(parse_csv(
      "id,group,familiarity,basis_theory,basis_practice,basis_peer,basis_intuition\n"
      "e1,decision_maker,Very familiar,large,medium,small,small\n",
      "experts.csv"));
  REQUIRE(experts.size() == 1);
  CHECK(experts[0].familiarity == Familiarity::VeryFamiliar);
  CHECK(experts[0].impact(JudgmentBasis::PracticalExperience) == Impact::Medium);
  CHECK_ERROR_KIND(parse_experts(parse_csv("id,group,familiarity,basis_theory,basis_practice,basis_peer,basis_intuition\n"
                                           "e1,wizard,familiar,large,large,large,large\n",
                                           "experts.csv")),
                   ErrorKind::InvalidInput);

  std::string header = "respondent_id";
  std::string row = "r1";
  for (int q = 1; q <= 21; ++q) {
    header += ",q" + std::to_string(q);
    row += q == 5 ? "," : ",3";
  }
  const auto resp = parse_responses(parse_csv(header + "\n" + row + "\n", "responses.csv"), load_default_instrument());
  CHECK(resp.answers[0][4] == std::nullopt);
  CHECK(resp.answers[0][0] == 3);
  CHECK_ERROR_KIND(parse_responses(parse_csv("respondent_id,q1\nr1,3\n", "responses.csv"), load_default_instrument()),
                   ErrorKind::Schema);

  const auto bonus = parse_expert_bonus(parse_csv("expert_id,compliance,sociability\ne1,4,3\n", "b.csv"),
                                        load_default_instrument());
  CHECK(bonus.ratings(0, 1) == 3);

  const auto imp = parse_importance(parse_csv("rater_id,x,y\nv1,7,5\nv2,6,1\n", "imp.csv"));
  CHECK(imp.item_ids == std::vector<std::string>{"x", "y"});
  CHECK(imp.ratings(1, 1) == 1);
  CHECK_ERROR_KIND(parse_importance(parse_csv("rater_id,x\nv1,8\n", "imp.csv")), ErrorKind::InvalidInput);

  const auto pw = parse_pairwise(parse_csv("id,a,b\na,1,1/3\nb,3,1\n", "pw.csv"));
  CHECK(pw.entries()(0, 1) == 1.0 / 3);
  CHECK_ERROR_KIND(parse_pairwise(parse_csv("id,a,b\nb,1,3\na,1/3,1\n", "pw.csv")), ErrorKind::Schema);
  CHECK_ERROR_KIND(parse_pairwise(parse_csv("id,a,b\na,1,2\nb,3,1\n", "pw.csv")), ErrorKind::InvalidMatrix);
}

TEST_CASE("round form carries previous means") {
  IndicatorNode a;
  a.id = "a";
  a.name = "Alpha";
  a.level = Level::Dimension;
  const IndicatorTree tree({a});
  const auto prev = sample_round();
  const auto form = emit_round_form(prev, {"c", "a", "b"}, 2, tree);
  REQUIRE(form.rows.size() == 3);
  CHECK(form.rows[0].indicator_id == "a");
  CHECK(form.rows[0].name == "Alpha");
  CHECK(form.rows[0].prev_mean == 4.2);
  CHECK(form.rows[1].prev_mean == 3.9);
  CHECK(form.rows[2].prev_mean == 4.8);
  const auto csv = render_round_form_csv(form);
  CHECK(csv == "indicator_id,name,prev_mean,rating\na,Alpha,4.2000,\nb,,3.9000,\nc,,4.8000,\n");
  CHECK(render_round_form_csv(emit_round_form(prev, {"c", "a", "b"}, 2, tree)) == csv);
  CHECK(render_round_form_markdown(form).find("| a | Alpha | 4.2000 |") != std::string::npos);

  CHECK_ERROR_KIND(emit_round_form(prev, {}, 2, tree), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(emit_round_form(prev, {"a", "zz"}, 2, tree), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(emit_round_form(prev, {"a"}, 1, tree), ErrorKind::InvalidInput);
}

TEST_CASE("filled round forms assemble into the retained set") {
  const auto form = emit_round_form(sample_round(), {"b", "c"}, 2, IndicatorTree{});
  const auto blank = render_round_form_csv(form);
  auto fill = [&](const std::string& x, const std::string& y) {
    std::string out = blank;
    const auto first = out.find(",\n", out.find("\nb,"));
    out.insert(first + 1, x);
    const auto second = out.find(",\n", out.find("\nc,"));
    out.insert(second + 1, y);
    return out;
  };
  std::vector<std::pair<std::string, FilledForm>> sheets{
      {"e1", parse_filled_form(fill("5", "4"), "e1.csv")},
      {"e2", parse_filled_form(fill("3", "4"), "e2.csv")},
      {"e3", parse_filled_form(blank, "e3.csv")},
  };
  const auto round = assemble_round(sheets, 2, 5, 4);
  CHECK(round.indicator_ids() == std::vector<std::string>{"b", "c"});
  CHECK(round.returned() == 2);
  CHECK(round.distributed() == 4);
  CHECK(round.responding_matrix()(0, 0) == 5);
  CHECK(round.responding_matrix()(1, 0) == 3);
}

TEST_CASE("report JSON keeps exact values next to display strings") {
  ReportBundle b;
  b.rounds.push_back({sample_round(), std::nullopt});
  const auto j = report_to_json(b);
  const auto& r = j["rounds"][0];
  CHECK(r["cr"].get<double>() == authority_coefficient(0.8864, 0.8651));
  CHECK(r["cr_display"] == "0.8758");
  CHECK(r["positivity_display"] == "1.00");
  CHECK(j["format"] == "stage-report");
  CHECK(j["weights"].is_null());

  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"format", "version", "rounds", "weights", "reliability", "validity", "score"});

  const auto uniform = report_to_json(b, DisplayOptions::uniform(6));
  CHECK(uniform["rounds"][0]["cr_display"] == "0.875750");
}

TEST_CASE("an empty screening verdict still has its arrays") {
  ReportBundle b;
  ScreeningSection s{ScreeningThresholds(1, 0, 1), true, {}};
  b.rounds.push_back({sample_round(), s});
  const auto j = report_to_json(b);
  const auto& sc = j["rounds"][0]["screening"];
  REQUIRE(sc.is_object());
  CHECK(sc["retained"].is_array());
  CHECK(sc["retained"].empty());
  CHECK(sc["dropped"].is_array());
  CHECK(sc["dropped"].empty());
}

TEST_CASE("JSON and markdown show the same display values") {
  const auto bundle = run_pipeline(fs::path(STAGE_DEMO_DIR) / "pipeline.json");
  std::set<std::string> shown;
  collect_displays(report_to_json(bundle), shown);
  const auto md = render_report(bundle, ReportFormat::Markdown);
  CHECK(shown.size() > 20);
  for (const auto& s : shown) CHECK_MESSAGE(md.find(s) != std::string::npos, s);
}

TEST_CASE("report JSON round trips") {
  const auto bundle = run_pipeline(fs::path(STAGE_DEMO_DIR) / "pipeline.json");
  const auto text = render_report(bundle, ReportFormat::Json);
  const auto back = report_from_json(nlohmann::json::parse(text));
  CHECK(render_report(back, ReportFormat::Json) == text);
  CHECK_ERROR_KIND(report_from_json(nlohmann::json::parse(R"({"format":"other"})")), ErrorKind::Schema);
}

TEST_CASE("merging reports replaces rounds by number") {
  ReportBundle a, b;
  auto r1 = sample_round();
  auto r2 = sample_round();
  r2.round_no = 2;
  a.rounds = {{r2, std::nullopt}};
  b.rounds = {{r1, std::nullopt}};
  auto r2b = r2;
  r2b.kendall_w = 0.5;
  b.rounds.push_back({r2b, std::nullopt});
  merge_report(a, b);
  REQUIRE(a.rounds.size() == 2);
  CHECK(a.rounds[0].consensus.round_no == 1);
  CHECK(a.find_round(2)->consensus.kendall_w == 0.5);
}

TEST_CASE("pipeline runs the demo deterministically") {
  const auto cfg = fs::path(STAGE_DEMO_DIR) / "pipeline.json";
  const auto first = render_report(run_pipeline(cfg), ReportFormat::Json);
  const auto second = render_report(run_pipeline(cfg), ReportFormat::Json);
  CHECK(first == second);
  const auto bundle = run_pipeline(cfg);
  CHECK(bundle.rounds.size() == 3);
  CHECK(bundle.weights.has_value());
  CHECK(bundle.reliability.has_value());
  CHECK(bundle.validity.has_value());
  CHECK(bundle.score.has_value());
}

TEST_CASE("pipeline stages agree with running each step directly") {
  const fs::path demo(STAGE_DEMO_DIR);
  const auto bundle = run_pipeline(demo / "pipeline.json");
  const auto experts = read_experts(demo / "experts.csv");
  RatingsOptions opt;
  opt.round_no = 3;
  const auto r3 = analyze_round(read_ratings(demo / "ratings_round3.csv", opt), experts);
  const auto& got = bundle.find_round(3)->consensus;
  CHECK(got.cr == r3.cr);
  CHECK(got.kendall_w == r3.kendall_w);
  CHECK(got.positivity == 0.8);
  const auto rel = reliability_report(read_responses(demo / "responses.csv", load_default_instrument()),
                                      load_default_instrument());
  CHECK(bundle.reliability->total_alpha == rel.total_alpha);
}

TEST_CASE("pipeline reports the failing stage") {
  const auto dir = scratch_dir("missing");
  const fs::path demo(STAGE_DEMO_DIR);
  nlohmann::json cfg{{"stages", {"reliability"}}};
  std::ofstream(dir / "config.json") << cfg.dump();
  const auto msg = error_of([&] { run_pipeline(dir / "config.json"); });
  CHECK(msg.starts_with("reliability: missing input"));

  cfg = {{"stages", {"reliability"}}, {"reliability", {{"responses", (dir / "nope.csv").string()}}}};
  std::ofstream(dir / "config2.json") << cfg.dump();
  const auto io = error_of([&] { run_pipeline(dir / "config2.json"); });
  CHECK(io.starts_with("reliability: "));
  CHECK(io.find("nope.csv") != std::string::npos);

  cfg = {{"stages", {"bogus"}}};
  std::ofstream(dir / "config3.json") << cfg.dump();
  CHECK_ERROR_KIND(run_pipeline(dir / "config3.json"), ErrorKind::Schema);
  fs::remove_all(dir);
}

TEST_CASE("error messages name the file") {
  CHECK(error_of([] { read_csv("/nonexistent/file.csv"); }).find("/nonexistent/file.csv") != std::string::npos);
  CHECK_ERROR_KIND(read_csv("/nonexistent/file.csv"), ErrorKind::Io);
  const auto msg = error_of([] {
    parse_indicators(parse_csv("id,name,level,parent_id,bonus\na,A,leaf,,false\n", "ind.csv"));
  });
  CHECK(msg.find("ind.csv:2:3") != std::string::npos);
}

TEST_CASE("exit codes split validation from numeric problems") {
  CHECK(exit_code(ErrorKind::Schema) == 2);
  CHECK(exit_code(ErrorKind::InvalidInput) == 2);
  CHECK(exit_code(ErrorKind::InvalidMatrix) == 2);
  CHECK(exit_code(ErrorKind::Io) == 2);
  CHECK(exit_code(ErrorKind::Degenerate) == 3);
  CHECK(exit_code(ErrorKind::Numeric) == 3);
  CHECK(exit_code(ErrorKind::InsufficientData) == 3);
  CHECK(exit_code(ErrorKind::UnsupportedOrder) == 3);
}
