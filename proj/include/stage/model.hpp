#pragma once

// Shared domain types: the indicator hierarchy, expert profiles, Delphi
// rating rounds, the STAGE questionnaire and collected responses.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stage/matrix.hpp"

namespace stage {

enum class Level { Dimension, Index, Item };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct IndicatorNode {
  std::string id;
  std::string name;
  Level level = Level::Item;
  std::optional<std::string> parent_id;
  std::optional<double> local_weight;
  std::optional<double> global_weight;
  bool bonus = false;

  bool operator==(const IndicatorNode&) const = default;
};

/// Nodes sharing a parent and a bonus flag. Root dimensions form one group
/// per bonus flag, so the three core dimensions are normalized together and
/// supplementary indicators separately.
struct SiblingGroup {
  std::optional<std::string> parent_id;
  bool bonus = false;
  std::vector<std::string> members;

  /// Stable key: the parent id, "<root>" for core roots, "<bonus>" for bonus roots.
  std::string key() const;
};

/// Dimension -> Index -> Item hierarchy. Nodes are kept sorted by id so every
/// traversal is deterministic. Construction never throws; use validate_tree to
/// find structural problems.
class IndicatorTree {
 public:
  IndicatorTree() = default;
  explicit IndicatorTree(std::vector<IndicatorNode> nodes);

  const std::vector<IndicatorNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const IndicatorNode* find(std::string_view id) const;
  std::vector<const IndicatorNode*> children(std::string_view parent_id) const;
  std::vector<const IndicatorNode*> roots() const;
  bool is_leaf(std::string_view id) const;

  std::vector<SiblingGroup> sibling_groups() const;

  /// Copy with local weights replaced for the given ids (others untouched).
  IndicatorTree with_local_weights(const std::map<std::string, double>& weights) const;

  bool operator==(const IndicatorTree&) const = default;

 private:
  std::vector<IndicatorNode> nodes_;
};

enum class ViolationKind {
  DuplicateId,
  MissingParent,
  LevelMismatch,
  Cycle,
  WeightRange,
  WeightSum,
  BonusPlacement,
};

std::string_view to_string(ViolationKind kind);

struct TreeViolation {
  std::string node_id;
  ViolationKind kind;
  std::string message;
};

/// Empty result iff the tree is well-formed.
std::vector<TreeViolation> validate_tree(const IndicatorTree& tree);

// ---------------------------------------------------------------------------
// Experts

enum class IdentityGroup {
  DecisionMaker,
  TechnologyDeveloper,
  SocialTechResearcher,
  TechnologyImplementer,
  Other,
};

enum class Familiarity { VeryFamiliar, Familiar, Moderate, Unfamiliar, VeryUnfamiliar };

enum class JudgmentBasis { TheoreticalAnalysis, PracticalExperience, PeerReference, Intuition };

enum class Impact { Large, Medium, Small };

inline constexpr std::size_t kBasisCount = 4;
inline constexpr std::size_t kImpactCount = 3;
inline constexpr std::size_t kFamiliarityCount = 5;

std::string_view to_string(IdentityGroup group);
std::string_view to_string(Familiarity level);
std::string_view to_string(Impact impact);
std::optional<IdentityGroup> parse_identity_group(std::string_view text);
std::optional<Familiarity> parse_familiarity(std::string_view text);
std::optional<Impact> parse_impact(std::string_view text);

struct ExpertProfile {
  std::string id;
  IdentityGroup group = IdentityGroup::Other;
  Familiarity familiarity = Familiarity::Moderate;
  // Indexed by JudgmentBasis; each basis appears exactly once by construction.
  std::array<Impact, kBasisCount> judgment_basis{Impact::Medium, Impact::Medium, Impact::Medium,
                                                 Impact::Medium};

  Impact impact(JudgmentBasis basis) const {
    return judgment_basis[static_cast<std::size_t>(basis)];
  }

  bool operator==(const ExpertProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Delphi rounds

struct ExpertRatings {
  std::string expert_id;
  std::optional<std::vector<int>> ratings;  // nullopt = questionnaire not returned

  bool operator==(const ExpertRatings&) const = default;
};

/// One consultation round. Throws InvalidInput on construction if any rating
/// is outside [1, scale_max] or more experts responded than were sent forms.
class RatingRound {
 public:
  RatingRound(int round_no, int scale_max, std::size_t distributed,
              std::vector<std::string> indicator_ids, std::vector<ExpertRatings> rows);

  int round_no() const noexcept { return round_no_; }
  int scale_max() const noexcept { return scale_max_; }
  std::size_t distributed() const noexcept { return distributed_; }
  const std::vector<std::string>& indicator_ids() const noexcept { return indicator_ids_; }
  const std::vector<ExpertRatings>& rows() const noexcept { return rows_; }

  std::size_t returned() const;
  std::vector<std::string> responding_experts() const;
  /// responding experts x indicators
  Matrix<int> responding_matrix() const;

  bool operator==(const RatingRound&) const = default;

 private:
  int round_no_;
  int scale_max_;
  std::size_t distributed_;
  std::vector<std::string> indicator_ids_;
  std::vector<ExpertRatings> rows_;
};

/// Inclusive screening bounds. Throws InvalidInput unless all values are
/// finite, fsf_floor is in [0,1] and cv_ceiling >= 0.
class ScreeningThresholds {
 public:
  ScreeningThresholds(double mean_floor, double fsf_floor, double cv_ceiling);

  double mean_floor() const noexcept { return mean_floor_; }
  double fsf_floor() const noexcept { return fsf_floor_; }
  double cv_ceiling() const noexcept { return cv_ceiling_; }

  bool operator==(const ScreeningThresholds&) const = default;

 private:
  double mean_floor_;
  double fsf_floor_;
  double cv_ceiling_;
};

// ---------------------------------------------------------------------------
// Questionnaire

inline constexpr int kAnswerMin = 0;
inline constexpr int kAnswerMax = 4;

struct Question {
  std::string id;
  std::string text;
  int min_value = kAnswerMin;
  int max_value = kAnswerMax;

  bool operator==(const Question&) const = default;
};

struct InstrumentDimension {
  std::string id;
  std::string name;

  bool operator==(const InstrumentDimension&) const = default;
};

struct InstrumentIndex {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  std::string dimension_id;
  std::vector<std::string> question_ids;

  bool operator==(const InstrumentIndex&) const = default;
};

struct BonusIndicator {
  std::string id;
  std::string name;

  bool operator==(const BonusIndicator&) const = default;
};

struct Instrument {
  std::vector<InstrumentDimension> dimensions;
  std::vector<InstrumentIndex> indices;
  std::vector<Question> questions;
  std::vector<BonusIndicator> bonus_indicators;

  const InstrumentIndex* find_index(std::string_view id) const;
  std::size_t question_position(std::string_view id) const;  // npos-like: questions.size()

  bool operator==(const Instrument&) const = default;
};

/// Lists problems such as a question owned by zero or several indices.
std::vector<std::string> validate_instrument(const Instrument& instrument);

/// The bundled STAGE questionnaire: 3 dimensions, 8 indices, 21 questions
/// answered 0..4, plus the Compliance and Sociability bonus indicators.
const Instrument& load_default_instrument();

/// The 3/8/16 STAGE indicator tree plus the two bonus indicators, unweighted.
IndicatorTree default_indicator_tree();

/// Illustrative local weights for the default tree. Not published values;
/// used only by the demo dataset and tests.
std::map<std::string, double> synthetic_demo_weights();

// ---------------------------------------------------------------------------
// Responses

/// Consumer answers: respondent x question, nullopt marks a missing answer.
struct ConsumerResponses {
  std::vector<std::string> respondent_ids;
  std::vector<std::string> question_ids;
  std::vector<std::vector<std::optional<int>>> answers;

  bool operator==(const ConsumerResponses&) const = default;
};

/// Expert ratings of the bonus indicators: expert x bonus indicator, 0..4.
struct BonusRatings {
  std::vector<std::string> expert_ids;
  std::vector<std::string> indicator_ids;
  Matrix<int> ratings;

  bool operator==(const BonusRatings&) const = default;
};

struct ResponseSet {
  ConsumerResponses consumer;
  BonusRatings bonus;
};

/// Throws InvalidInput on shape mismatches or values outside 0..4.
void check_responses(const ConsumerResponses& responses);
void check_bonus_ratings(const BonusRatings& bonus);

}  // namespace stage
