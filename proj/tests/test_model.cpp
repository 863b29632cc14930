#include <set>

#include "check_error.hpp"
#include "oracles.hpp"
#include "stage/inputs.hpp"
#include "stage/model.hpp"

using namespace stage;

namespace {

IndicatorNode node(std::string id, Level level, std::optional<std::string> parent = std::nullopt) {
  IndicatorNode n;
  n.id = std::move(id);
  n.name = n.id;
  n.level = level;
  n.parent_id = std::move(parent);
  return n;
}

std::size_t count_kind(const std::vector<TreeViolation>& v, ViolationKind kind) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const auto& x) { return x.kind == kind; }));
}

}  // namespace

TEST_CASE("default tree is well formed with 3 dimensions, 8 indices, 16 items") {
  const auto tree = default_indicator_tree();
  CHECK(validate_tree(tree).empty());
  std::size_t dims = 0, indices = 0, items = 0, bonus = 0;
  for (const auto& n : tree.nodes()) {
    if (n.bonus) {
      ++bonus;
      continue;
    }
    dims += n.level == Level::Dimension;
    indices += n.level == Level::Index;
    items += n.level == Level::Item;
  }
  CHECK(dims == 3);
  CHECK(indices == 8);
  CHECK(items == 16);
  CHECK(bonus == 2);
  const auto* learn = tree.find("ux.availability.learnability");
  REQUIRE(learn != nullptr);
  CHECK(learn->name == "Function is easy to learn");
}

TEST_CASE("empty tree is vacuously valid") { CHECK(validate_tree(IndicatorTree{}).empty()); }

TEST_CASE("item under a dimension is a single level violation") {
  IndicatorTree tree({node("d", Level::Dimension), node("d.x", Level::Item, "d")});
  const auto v = validate_tree(tree);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::LevelMismatch);
  CHECK(v[0].node_id == "d.x");
}

TEST_CASE("structural violations are each reported") {
  SUBCASE("missing parent") {
    IndicatorTree tree({node("i", Level::Index, "nowhere")});
    CHECK(count_kind(validate_tree(tree), ViolationKind::MissingParent) == 1);
  }
  SUBCASE("duplicate id") {
    IndicatorTree tree({node("d", Level::Dimension), node("d", Level::Dimension)});
    CHECK(count_kind(validate_tree(tree), ViolationKind::DuplicateId) >= 1);
  }
  SUBCASE("dimension with a parent") {
    IndicatorTree tree({node("d", Level::Dimension), node("e", Level::Dimension, "d")});
    CHECK(count_kind(validate_tree(tree), ViolationKind::LevelMismatch) == 1);
  }
  SUBCASE("cycle") {
    IndicatorTree tree({node("a", Level::Index, "b"), node("b", Level::Index, "a")});
    CHECK(count_kind(validate_tree(tree), ViolationKind::Cycle) >= 1);
  }
  SUBCASE("weights out of range or not summing to one") {
    auto a = node("a", Level::Dimension);
    auto b = node("b", Level::Dimension);
    a.local_weight = 0.7;
    b.local_weight = 0.7;
    CHECK(count_kind(validate_tree(IndicatorTree({a, b})), ViolationKind::WeightSum) == 1);
    b.local_weight = -0.1;
    CHECK(count_kind(validate_tree(IndicatorTree({a, b})), ViolationKind::WeightRange) == 1);
  }
  SUBCASE("bonus flag under a core parent") {
    auto d = node("d", Level::Dimension);
    auto i = node("d.i", Level::Index, "d");
    i.bonus = true;
    CHECK(count_kind(validate_tree(IndicatorTree({d, i})), ViolationKind::BonusPlacement) == 1);
  }
}

TEST_CASE("valid tree implies every weighted sibling group sums to one") {
  const auto tree = default_indicator_tree().with_local_weights(synthetic_demo_weights());
  REQUIRE(validate_tree(tree).empty());
  for (const auto& g : tree.sibling_groups()) {
    double sum = 0;
    for (const auto& id : g.members) sum += tree.find(id)->local_weight.value();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sibling groups separate core and bonus roots") {
  const auto groups = default_indicator_tree().sibling_groups();
  std::set<std::string> keys;
  for (const auto& g : groups) keys.insert(g.key());
  CHECK(keys.count("<root>") == 1);
  CHECK(keys.count("<bonus>") == 1);
  for (const auto& g : groups) {
    if (g.key() == "<root>") CHECK(g.members == std::vector<std::string>{"pq", "sp", "ux"});
    if (g.key() == "<bonus>") CHECK(g.members.size() == 2);
  }
}

TEST_CASE("tree survives a CSV round trip") {
  const auto tree = default_indicator_tree().with_local_weights(synthetic_demo_weights());
  const auto text = write_indicators(tree);
  const auto back = parse_indicators(parse_csv(text, "mem"));
  CHECK(back == tree);
  CHECK(write_indicators(back) == text);
}

TEST_CASE("round trip keeps awkward names and exact weights") {
  auto a = node("a", Level::Dimension);
  a.name = "Name, with \"quotes\"";
  a.local_weight = 0.1 + 0.2;
  auto b = node("b", Level::Dimension);
  b.local_weight = 1.0 - (0.1 + 0.2);
  const IndicatorTree tree({a, b});
  CHECK(parse_indicators(parse_csv(write_indicators(tree), "mem")) == tree);
}

TEST_CASE("default instrument matches the 21-question layout") {
  const auto& inst = load_default_instrument();
  CHECK(inst.questions.size() == 21);
  CHECK(inst.indices.size() == 8);
  CHECK(inst.dimensions.size() == 3);
  CHECK(validate_instrument(inst).empty());

  const std::vector<std::size_t> sizes{3, 3, 2, 2, 2, 2, 3, 4};
  std::size_t next = 1;
  for (std::size_t k = 0; k < inst.indices.size(); ++k) {
    REQUIRE(inst.indices[k].question_ids.size() == sizes[k]);
    for (const auto& q : inst.indices[k].question_ids) CHECK(q == "q" + std::to_string(next++));
  }

  const auto* social = inst.find_index("sp.social_integration");
  REQUIRE(social != nullptr);
  CHECK(social->name == "Social integration");
  CHECK(social->question_ids == std::vector<std::string>{"q18", "q19", "q20", "q21"});

  REQUIRE(inst.bonus_indicators.size() == 2);
  CHECK(inst.bonus_indicators[0].name == "Compliance");
  CHECK(inst.bonus_indicators[1].name == "Sociability");

  const auto* avail = inst.find_index("ux.availability");
  REQUIRE(avail != nullptr);
  CHECK(std::find(avail->aliases.begin(), avail->aliases.end(), "Usability") != avail->aliases.end());
  for (const auto& q : inst.questions) {
    CHECK(q.min_value == 0);
    CHECK(q.max_value == 4);
  }
}

TEST_CASE("default instrument is a pure constant") {
  const Instrument copy = load_default_instrument();
  CHECK(copy == load_default_instrument());
  CHECK(default_indicator_tree() == default_indicator_tree());
}

TEST_CASE("instrument validation catches shared and orphan questions") {
  Instrument inst = load_default_instrument();
  inst.indices[1].question_ids.push_back("q1");
  CHECK_FALSE(validate_instrument(inst).empty());
  inst = load_default_instrument();
  inst.indices[7].question_ids.pop_back();
  CHECK_FALSE(validate_instrument(inst).empty());
}

TEST_CASE("rating round validates ranges and response counts") {
  CHECK_ERROR_KIND(RatingRound(1, 5, 2, {"a"}, {{"e1", std::vector<int>{6}}}), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(RatingRound(1, 5, 2, {"a"}, {{"e1", std::vector<int>{0}}}), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(RatingRound(1, 5, 1, {"a"}, {{"e1", std::vector<int>{3}}, {"e2", std::vector<int>{3}}}),
                   ErrorKind::InvalidInput);
  const RatingRound r(1, 5, 3, {"a", "b"},
                      {{"e1", std::vector<int>{3, 4}}, {"e2", std::nullopt}, {"e3", std::vector<int>{5, 1}}});
  CHECK(r.returned() == 2);
  CHECK(r.responding_experts() == std::vector<std::string>{"e1", "e3"});
  const auto m = r.responding_matrix();
  CHECK(m.rows() == 2);
  CHECK(m(1, 0) == 5);
}

TEST_CASE("screening thresholds enforce their domain") {
  CHECK_ERROR_KIND(ScreeningThresholds(3.0, 1.5, 0.2), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(ScreeningThresholds(3.0, 0.5, -0.1), ErrorKind::InvalidInput);
  CHECK_NOTHROW(ScreeningThresholds(3.0, 0.0, 0.0));
}

TEST_CASE("response checks reject out-of-range answers") {
  ConsumerResponses r{{"r1"}, {"q1"}, {{5}}};
  CHECK_ERROR_KIND(check_responses(r), ErrorKind::InvalidInput);
  r.answers = {{std::nullopt}};
  CHECK_NOTHROW(check_responses(r));
  BonusRatings b{{"e1"}, {"compliance"}, Matrix<int>::from_rows({{-1}})};
  CHECK_ERROR_KIND(check_bonus_ratings(b), ErrorKind::InvalidInput);
}

TEST_CASE("enum text round trips") {
  for (auto g : {IdentityGroup::DecisionMaker, IdentityGroup::TechnologyDeveloper, IdentityGroup::SocialTechResearcher,
                 IdentityGroup::TechnologyImplementer, IdentityGroup::Other})
    CHECK(parse_identity_group(to_string(g)) == g);
  for (auto f : {Familiarity::VeryFamiliar, Familiarity::Familiar, Familiarity::Moderate, Familiarity::Unfamiliar,
                 Familiarity::VeryUnfamiliar})
    CHECK(parse_familiarity(to_string(f)) == f);
  for (auto l : {Level::Dimension, Level::Index, Level::Item}) CHECK(parse_level(to_string(l)) == l);
  CHECK(parse_familiarity("Very Familiar") == Familiarity::VeryFamiliar);
  CHECK_FALSE(parse_impact("huge").has_value());
}
