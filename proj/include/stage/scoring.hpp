#pragma once

// Composite age-appropriateness scores: consumer answers weighted up the
// indicator hierarchy, plus an additive expert bonus.

#include <cstddef>
#include <string>
#include <vector>

#include "stage/ahp.hpp"
#include "stage/matrix.hpp"
#include "stage/model.hpp"

namespace stage {

inline constexpr double kDefaultBonusCap = 10.0;

struct DimensionScore {
  std::string id;
  double weight = 0.0;
  double score = 0.0;  // 0..100

  bool operator==(const DimensionScore&) const = default;
};

struct RespondentScore {
  std::string respondent_id;
  bool imputed = false;
  std::vector<double> dimension_scores;  // parallel to ConsumerScores::dimensions
  double composite = 0.0;
};

struct ConsumerScores {
  std::vector<DimensionScore> dimensions;  // pooled scores with dimension weights
  std::vector<RespondentScore> respondents;
  std::size_t imputed_answers = 0;
};

/// Question value/4 -> index mean -> weighted dimension score x 100. Missing
/// answers are replaced by the mean of that question over respondents who
/// answered it, and the respondent is flagged.
ConsumerScores score_consumer(const ConsumerResponses& responses, const Instrument& instrument,
                              const WeightTable& weights);

/// Mean bonus rating over experts and indicators, scaled from 0..4 to 0..cap.
double score_expert_bonus(const Matrix<int>& bonus, double cap = kDefaultBonusCap);

struct ScoreCard {
  std::vector<DimensionScore> dimensions;
  double core_composite = 0.0;      // 0..100
  double bonus = 0.0;               // 0..cap
  double bonus_cap = kDefaultBonusCap;
  double final_score = 0.0;         // 0..100+cap
  double final_renormalized = 0.0;  // final rescaled to 0..100
  std::size_t respondent_count = 0;
  std::vector<std::string> imputed_respondents;
};

/// final = sum_d w_d * score_d + bonus. Dimension weights must sum to 1.
ScoreCard composite(const std::vector<DimensionScore>& dimensions, double bonus,
                    double cap = kDefaultBonusCap);

/// Consumer scoring, expert bonus and composite in one call. An empty bonus
/// matrix contributes 0.
ScoreCard score_software(const ConsumerResponses& responses, const BonusRatings& bonus,
                         const Instrument& instrument, const WeightTable& weights,
                         double cap = kDefaultBonusCap);

}  // namespace stage
