#include "stage/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stage/text.hpp"

namespace stage {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<std::string_view, N>& names) {
  const std::string key = normalize_token(text);
  for (std::size_t i = 0; i < N; ++i) {
    if (key == names[i]) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 3> kLevelNames{"dimension", "index", "item"};
constexpr std::array<std::string_view, 5> kGroupNames{
    "decision_maker", "technology_developer", "social_technology_researcher",
    "technology_implementer", "other"};
constexpr std::array<std::string_view, 5> kFamiliarityNames{
    "very_familiar", "familiar", "moderate", "unfamiliar", "very_unfamiliar"};
constexpr std::array<std::string_view, 3> kImpactNames{"large", "medium", "small"};

std::optional<Level> expected_parent_level(Level level) {
  switch (level) {
    case Level::Dimension: return std::nullopt;
    case Level::Index: return Level::Dimension;
    case Level::Item: return Level::Index;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Level level) { return kLevelNames[static_cast<std::size_t>(level)]; }
std::optional<Level> parse_level(std::string_view text) { return lookup<Level>(text, kLevelNames); }

std::string_view to_string(IdentityGroup group) {
  return kGroupNames[static_cast<std::size_t>(group)];
}
std::string_view to_string(Familiarity level) {
  return kFamiliarityNames[static_cast<std::size_t>(level)];
}
std::string_view to_string(Impact impact) { return kImpactNames[static_cast<std::size_t>(impact)]; }

std::optional<IdentityGroup> parse_identity_group(std::string_view text) {
  return lookup<IdentityGroup>(text, kGroupNames);
}
std::optional<Familiarity> parse_familiarity(std::string_view text) {
  return lookup<Familiarity>(text, kFamiliarityNames);
}
std::optional<Impact> parse_impact(std::string_view text) {
  return lookup<Impact>(text, kImpactNames);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::MissingParent: return "missing-parent";
    case ViolationKind::LevelMismatch: return "level-mismatch";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::WeightRange: return "weight-range";
    case ViolationKind::WeightSum: return "weight-sum";
    case ViolationKind::BonusPlacement: return "bonus-placement";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// IndicatorTree

std::string SiblingGroup::key() const {
  if (parent_id) return *parent_id;
  return bonus ? "<bonus>" : "<root>";
}

IndicatorTree::IndicatorTree(std::vector<IndicatorNode> nodes) : nodes_(std::move(nodes)) {
  std::stable_sort(nodes_.begin(), nodes_.end(),
                   [](const IndicatorNode& a, const IndicatorNode& b) { return a.id < b.id; });
}

const IndicatorNode* IndicatorTree::find(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const IndicatorNode& n, std::string_view v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<const IndicatorNode*> IndicatorTree::children(std::string_view parent_id) const {
  std::vector<const IndicatorNode*> out;
  for (const auto& n : nodes_) {
    if (n.parent_id && *n.parent_id == parent_id) out.push_back(&n);
  }
  return out;
}

std::vector<const IndicatorNode*> IndicatorTree::roots() const {
  std::vector<const IndicatorNode*> out;
  for (const auto& n : nodes_) {
    if (!n.parent_id) out.push_back(&n);
  }
  return out;
}

bool IndicatorTree::is_leaf(std::string_view id) const {
  return std::none_of(nodes_.begin(), nodes_.end(), [&](const IndicatorNode& n) {
    return n.parent_id && *n.parent_id == id;
  });
}

std::vector<SiblingGroup> IndicatorTree::sibling_groups() const {
  std::map<std::pair<std::string, int>, SiblingGroup> groups;
  for (const auto& n : nodes_) {
    // Roots sort first: "" < any id. The second key separates bonus roots.
    const std::string parent = n.parent_id.value_or("");
    const int bonus_key = n.parent_id ? 0 : (n.bonus ? 1 : 0);
    auto& g = groups[{parent, bonus_key}];
    g.parent_id = n.parent_id;
    g.bonus = n.bonus;
    g.members.push_back(n.id);
  }
  std::vector<SiblingGroup> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

IndicatorTree IndicatorTree::with_local_weights(const std::map<std::string, double>& weights) const {
  std::vector<IndicatorNode> copy = nodes_;
  for (auto& n : copy) {
    if (auto it = weights.find(n.id); it != weights.end()) n.local_weight = it->second;
  }
  return IndicatorTree(std::move(copy));
}

std::vector<TreeViolation> validate_tree(const IndicatorTree& tree) {
  std::vector<TreeViolation> out;
  const auto& nodes = tree.nodes();

  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id && (i == 1 || nodes[i - 2].id != nodes[i].id)) {
      out.push_back({nodes[i].id, ViolationKind::DuplicateId, "id '" + nodes[i].id + "' is not unique"});
    }
  }

  for (const auto& n : nodes) {
    const auto want = expected_parent_level(n.level);
    if (!want) {
      if (n.parent_id) {
        out.push_back({n.id, ViolationKind::LevelMismatch,
                       "dimension '" + n.id + "' must not have a parent"});
      }
    } else if (!n.parent_id) {
      out.push_back({n.id, ViolationKind::MissingParent,
                     std::string(to_string(n.level)) + " '" + n.id + "' has no parent"});
    } else if (const auto* parent = tree.find(*n.parent_id); parent == nullptr) {
      out.push_back({n.id, ViolationKind::MissingParent,
                     "parent '" + *n.parent_id + "' of '" + n.id + "' does not exist"});
    } else {
      if (parent->level != *want) {
        out.push_back({n.id, ViolationKind::LevelMismatch,
                       std::string(to_string(n.level)) + " '" + n.id + "' has " +
                           std::string(to_string(parent->level)) + " parent '" + parent->id +
                           "', expected " + std::string(to_string(*want))});
      }
      if (parent->bonus != n.bonus) {
        out.push_back({n.id, ViolationKind::BonusPlacement,
                       "bonus flag of '" + n.id + "' differs from its parent '" + parent->id + "'"});
      }
    }

    for (const auto& w : {n.local_weight, n.global_weight}) {
      if (w && !(*w >= 0.0 && *w <= 1.0)) {
        out.push_back({n.id, ViolationKind::WeightRange, "weight of '" + n.id + "' outside [0,1]"});
        break;
      }
    }
  }

  // Cycles: walk parent links; a walk longer than the node count revisits a node.
  std::set<std::string> reported;
  for (const auto& n : nodes) {
    const IndicatorNode* cur = &n;
    std::set<std::string> seen;
    while (cur != nullptr && cur->parent_id) {
      if (!seen.insert(cur->id).second) {
        const std::string& head = *std::min_element(seen.begin(), seen.end());
        if (reported.insert(head).second) {
          out.push_back({head, ViolationKind::Cycle, "parent chain through '" + head + "' is cyclic"});
        }
        break;
      }
      cur = tree.find(*cur->parent_id);
    }
  }

  for (const auto& g : tree.sibling_groups()) {
    double sum = 0.0;
    bool all_set = true;
    for (const auto& id : g.members) {
      const auto* node = tree.find(id);
      if (!node->local_weight) {
        all_set = false;
        break;
      }
      sum += *node->local_weight;
    }
    if (all_set && std::abs(sum - 1.0) > kWeightSumTolerance) {
      out.push_back({g.key(), ViolationKind::WeightSum,
                     "local weights under '" + g.key() + "' sum to " + std::to_string(sum)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// RatingRound / ScreeningThresholds

RatingRound::RatingRound(int round_no, int scale_max, std::size_t distributed,
                         std::vector<std::string> indicator_ids, std::vector<ExpertRatings> rows)
    : round_no_(round_no),
      scale_max_(scale_max),
      distributed_(distributed),
      indicator_ids_(std::move(indicator_ids)),
      rows_(std::move(rows)) {
  if (round_no_ < 1) fail(ErrorKind::InvalidInput, "round number must be positive");
  if (scale_max_ < 1) fail(ErrorKind::InvalidInput, "scale_max must be positive");
  std::set<std::string> ids(indicator_ids_.begin(), indicator_ids_.end());
  if (ids.size() != indicator_ids_.size()) {
    fail(ErrorKind::InvalidInput, "duplicate indicator id in round " + std::to_string(round_no_));
  }
  std::set<std::string> experts;
  for (const auto& row : rows_) {
    if (!experts.insert(row.expert_id).second) {
      fail(ErrorKind::InvalidInput, "duplicate expert '" + row.expert_id + "'");
    }
    if (!row.ratings) continue;
    if (row.ratings->size() != indicator_ids_.size()) {
      fail(ErrorKind::InvalidInput, "expert '" + row.expert_id + "' rated " +
                                        std::to_string(row.ratings->size()) + " of " +
                                        std::to_string(indicator_ids_.size()) + " indicators");
    }
    for (std::size_t j = 0; j < row.ratings->size(); ++j) {
      const int v = (*row.ratings)[j];
      if (v < 1 || v > scale_max_) {
        fail(ErrorKind::InvalidInput, "rating " + std::to_string(v) + " by '" + row.expert_id +
                                          "' for '" + indicator_ids_[j] + "' outside [1, " +
                                          std::to_string(scale_max_) + "]");
      }
    }
  }
  if (returned() > distributed_) {
    fail(ErrorKind::InvalidInput, std::to_string(returned()) + " responses exceed " +
                                      std::to_string(distributed_) + " distributed questionnaires");
  }
}

std::size_t RatingRound::returned() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const ExpertRatings& r) { return r.ratings.has_value(); }));
}

std::vector<std::string> RatingRound::responding_experts() const {
  std::vector<std::string> out;
  for (const auto& r : rows_) {
    if (r.ratings) out.push_back(r.expert_id);
  }
  return out;
}

Matrix<int> RatingRound::responding_matrix() const {
  Matrix<int> m(returned(), indicator_ids_.size());
  std::size_t i = 0;
  for (const auto& r : rows_) {
    if (!r.ratings) continue;
    for (std::size_t j = 0; j < indicator_ids_.size(); ++j) m(i, j) = (*r.ratings)[j];
    ++i;
  }
  return m;
}

ScreeningThresholds::ScreeningThresholds(double mean_floor, double fsf_floor, double cv_ceiling)
    : mean_floor_(mean_floor), fsf_floor_(fsf_floor), cv_ceiling_(cv_ceiling) {
  if (!std::isfinite(mean_floor) || !std::isfinite(fsf_floor) || !std::isfinite(cv_ceiling)) {
    fail(ErrorKind::InvalidInput, "screening thresholds must be finite");
  }
  if (fsf_floor < 0.0 || fsf_floor > 1.0) {
    fail(ErrorKind::InvalidInput, "full-score frequency floor must lie in [0,1]");
  }
  if (cv_ceiling < 0.0) fail(ErrorKind::InvalidInput, "cv ceiling must be non-negative");
}

// ---------------------------------------------------------------------------
// Instrument

const InstrumentIndex* Instrument::find_index(std::string_view id) const {
  for (const auto& idx : indices) {
    if (idx.id == id) return &idx;
  }
  return nullptr;
}

std::size_t Instrument::question_position(std::string_view id) const {
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (questions[i].id == id) return i;
  }
  return questions.size();
}

std::vector<std::string> validate_instrument(const Instrument& instrument) {
  std::vector<std::string> problems;
  std::map<std::string, int> owners;
  for (const auto& q : instrument.questions) owners[q.id] = 0;
  if (owners.size() != instrument.questions.size()) problems.push_back("duplicate question id");

  std::set<std::string> dims;
  for (const auto& d : instrument.dimensions) dims.insert(d.id);

  for (const auto& idx : instrument.indices) {
    if (!dims.contains(idx.dimension_id)) {
      problems.push_back("index '" + idx.id + "' refers to unknown dimension '" + idx.dimension_id + "'");
    }
    if (idx.question_ids.empty()) problems.push_back("index '" + idx.id + "' has no questions");
    for (const auto& q : idx.question_ids) {
      auto it = owners.find(q);
      if (it == owners.end()) {
        problems.push_back("index '" + idx.id + "' refers to unknown question '" + q + "'");
      } else {
        ++it->second;
      }
    }
  }
  for (const auto& [q, count] : owners) {
    if (count != 1) {
      problems.push_back("question '" + q + "' belongs to " + std::to_string(count) + " indices");
    }
  }
  return problems;
}

namespace {

Instrument build_default_instrument() {
  Instrument ins;
  ins.dimensions = {
      {"ux", "User experience"},
      {"pq", "Product quality"},
      {"sp", "Social promotion"},
  };
  ins.indices = {
      {"ux.availability", "Availability", {"Usability"}, "ux", {"q1", "q2", "q3"}},
      {"ux.perceptibility", "Perceptibility", {"Intelligibility"}, "ux", {"q4", "q5", "q6"}},
      {"ux.cost", "Cost consideration", {}, "ux", {"q7", "q8"}},
      {"ux.service", "Service experience", {}, "ux", {"q9", "q10"}},
      {"pq.security", "Security", {}, "pq", {"q11", "q12"}},
      {"pq.innovation", "Innovation", {"Innovativeness"}, "pq", {"q13", "q14"}},
      {"sp.ethics", "Ethics", {}, "sp", {"q15", "q16", "q17"}},
      {"sp.social_integration", "Social integration", {"Social influence"}, "sp",
       {"q18", "q19", "q20", "q21"}},
  };
  const std::array<std::string_view, 21> texts{
      "The main functions of the app are easy to learn.",
      "I can pick up new features without help from others.",
      "Everyday tasks take only a few simple steps.",
      "Text, icons and sounds are easy to see and hear.",
      "The layout makes it clear where things are.",
      "The app gives clear feedback after each action.",
      "The app is affordable to obtain and use.",
      "Using the app brings no hidden costs such as unwanted ads or data charges.",
      "The app takes the needs and values of older users into account.",
      "Help and after-sales support are easy to reach.",
      "I trust the app to protect my personal information.",
      "The app runs stably without crashes or freezes.",
      "The app offers new functions that improve my daily life.",
      "The app encourages continued use with helpful incentives.",
      "The app treats older users with respect.",
      "The app provides services suited to older users.",
      "The app can be customized for special needs.",
      "The app helps me learn about relevant policies.",
      "The app helps me stay in touch with family and friends.",
      "The app helps me take part in community activities.",
      "The app makes me feel included in digital society.",
  };
  for (std::size_t i = 0; i < texts.size(); ++i) {
    ins.questions.push_back({"q" + std::to_string(i + 1), std::string(texts[i]), kAnswerMin, kAnswerMax});
  }
  ins.bonus_indicators = {{"compliance", "Compliance"}, {"sociability", "Sociability"}};
  return ins;
}

}  // namespace

const Instrument& load_default_instrument() {
  static const Instrument instrument = build_default_instrument();
  return instrument;
}

IndicatorTree default_indicator_tree() {
  std::vector<IndicatorNode> nodes;
  auto add = [&](std::string id, std::string name, Level level, std::optional<std::string> parent,
                 bool bonus = false) {
    nodes.push_back({std::move(id), std::move(name), level, std::move(parent), std::nullopt,
                     std::nullopt, bonus});
  };
  for (const auto& d : load_default_instrument().dimensions) add(d.id, d.name, Level::Dimension, std::nullopt);
  for (const auto& idx : load_default_instrument().indices) add(idx.id, idx.name, Level::Index, idx.dimension_id);

  const std::array<std::array<std::string_view, 3>, 16> items{{
      {"ux.availability.learnability", "Function is easy to learn", "ux.availability"},
      {"ux.availability.operability", "Easy to operate", "ux.availability"},
      {"ux.perceptibility.audio_visual", "Audio-visual effect", "ux.perceptibility"},
      {"ux.perceptibility.interactive_feedback", "Interactive feedback", "ux.perceptibility"},
      {"ux.cost.direct", "Direct cost", "ux.cost"},
      {"ux.cost.indirect", "Indirect cost", "ux.cost"},
      {"ux.service.needs_values", "Needs and values considered", "ux.service"},
      {"ux.service.after_sales", "After-sales service", "ux.service"},
      {"pq.security.information", "Information security", "pq.security"},
      {"pq.security.stability", "System stability", "pq.security"},
      {"pq.innovation.functional", "Functional innovation", "pq.innovation"},
      {"pq.innovation.incentive", "Incentive mechanism", "pq.innovation"},
      {"sp.ethics.service", "Service", "sp.ethics"},
      {"sp.ethics.customization", "Special customization", "sp.ethics"},
      {"sp.social_integration.policy_awareness", "Policy awareness", "sp.social_integration"},
      {"sp.social_integration.integration", "Social integration", "sp.social_integration"},
  }};
  for (const auto& [id, name, parent] : items) {
    add(std::string(id), std::string(name), Level::Item, std::string(parent));
  }
  for (const auto& b : load_default_instrument().bonus_indicators) {
    add("bonus." + b.id, b.name, Level::Dimension, std::nullopt, true);
  }
  return IndicatorTree(std::move(nodes));
}

std::map<std::string, double> synthetic_demo_weights() {
  return {
      {"ux", 0.5},
      {"pq", 0.3},
      {"sp", 0.2},
      {"ux.availability", 0.3},
      {"ux.perceptibility", 0.3},
      {"ux.cost", 0.2},
      {"ux.service", 0.2},
      {"pq.security", 0.6},
      {"pq.innovation", 0.4},
      {"sp.ethics", 0.5},
      {"sp.social_integration", 0.5},
      {"ux.availability.learnability", 0.5},
      {"ux.availability.operability", 0.5},
      {"ux.perceptibility.audio_visual", 0.6},
      {"ux.perceptibility.interactive_feedback", 0.4},
      {"ux.cost.direct", 0.55},
      {"ux.cost.indirect", 0.45},
      {"ux.service.needs_values", 0.6},
      {"ux.service.after_sales", 0.4},
      {"pq.security.information", 0.7},
      {"pq.security.stability", 0.3},
      {"pq.innovation.functional", 0.6},
      {"pq.innovation.incentive", 0.4},
      {"sp.ethics.service", 0.5},
      {"sp.ethics.customization", 0.5},
      {"sp.social_integration.policy_awareness", 0.4},
      {"sp.social_integration.integration", 0.6},
      {"bonus.compliance", 0.5},
      {"bonus.sociability", 0.5},
  };
}

// ---------------------------------------------------------------------------
// Responses

void check_responses(const ConsumerResponses& responses) {
  if (responses.answers.size() != responses.respondent_ids.size()) {
    fail(ErrorKind::InvalidInput, "respondent ids and answer rows differ in count");
  }
  for (std::size_t r = 0; r < responses.answers.size(); ++r) {
    const auto& row = responses.answers[r];
    if (row.size() != responses.question_ids.size()) {
      fail(ErrorKind::InvalidInput, "respondent '" + responses.respondent_ids[r] + "' has " +
                                        std::to_string(row.size()) + " answers, expected " +
                                        std::to_string(responses.question_ids.size()));
    }
    for (std::size_t q = 0; q < row.size(); ++q) {
      if (row[q] && (*row[q] < kAnswerMin || *row[q] > kAnswerMax)) {
        fail(ErrorKind::InvalidInput, "answer " + std::to_string(*row[q]) + " of '" +
                                          responses.respondent_ids[r] + "' to '" +
                                          responses.question_ids[q] + "' outside 0..4");
      }
    }
  }
}

void check_bonus_ratings(const BonusRatings& bonus) {
  if (bonus.ratings.rows() != bonus.expert_ids.size() ||
      bonus.ratings.cols() != bonus.indicator_ids.size()) {
    fail(ErrorKind::InvalidInput, "bonus rating matrix does not match its expert/indicator ids");
  }
  for (std::size_t r = 0; r < bonus.ratings.rows(); ++r) {
    for (std::size_t c = 0; c < bonus.ratings.cols(); ++c) {
      const int v = bonus.ratings(r, c);
      if (v < kAnswerMin || v > kAnswerMax) {
        fail(ErrorKind::InvalidInput, "bonus rating " + std::to_string(v) + " by '" +
                                          bonus.expert_ids[r] + "' for '" + bonus.indicator_ids[c] +
                                          "' outside 0..4");
      }
    }
  }
}

}  // namespace stage
