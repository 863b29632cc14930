#pragma once

// Delphi round statistics: positivity, authority (Ca/Cs/Cr), per-indicator
// descriptives, Kendall's W and the +/-2 SD screening rules.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stage/matrix.hpp"
#include "stage/model.hpp"

namespace stage {

struct IndicatorStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample (n-1)
  double cv = 0.0;
  double full_score_freq = 0.0;

  bool operator==(const IndicatorStats&) const = default;
};

/// Ca contributions, judgment[basis][impact].
using JudgmentTable = std::array<std::array<double, kImpactCount>, kBasisCount>;
/// Cs values per familiarity level, most familiar first.
using FamiliarityMap = std::array<double, kFamiliarityCount>;

JudgmentTable default_judgment_table();
FamiliarityMap default_familiarity_map();

struct AuthorityTables {
  JudgmentTable judgment = default_judgment_table();
  FamiliarityMap familiarity = default_familiarity_map();
};

struct RoundConsensus {
  int round_no = 1;
  int scale_max = 5;
  std::size_t distributed = 0;
  std::size_t returned = 0;
  double positivity = 0.0;
  double ca = 0.0;
  double cs = 0.0;
  double cr = 0.0;
  double kendall_w = 0.0;
  bool tie_corrected = true;
  std::map<std::string, IndicatorStats> indicators;
};

double positivity_coefficient(std::size_t distributed, std::size_t returned);

double judgment_coefficient(std::span<const ExpertProfile> panel, const JudgmentTable& table);
double familiarity_coefficient(std::span<const ExpertProfile> panel, const FamiliarityMap& map);
double authority_coefficient(double ca, double cs);

IndicatorStats indicator_stats(std::span<const int> ratings, int scale_max);

/// Mid-ranks (1-based) of one rater's ratings; ties share the average rank.
std::vector<double> mid_ranks(std::span<const double> values);

/// Kendall's coefficient of concordance over a raters x items matrix.
/// Ratings are converted to within-rater mid-ranks first.
double kendalls_w(const Matrix<double>& ratings, bool correct_ties = true);
double kendalls_w(const Matrix<int>& ratings, bool correct_ties = true);

struct DroppedIndicator {
  std::string id;
  std::vector<std::string> reasons;  // subset of {"mean", "fsf", "cv"}, in that order

  bool operator==(const DroppedIndicator&) const = default;
};

struct ScreeningOutcome {
  std::vector<std::string> retained;
  std::vector<DroppedIndicator> dropped;
};

/// Retained iff mean >= mean_floor, fsf >= fsf_floor and cv <= cv_ceiling.
ScreeningOutcome screen_indicators(const std::map<std::string, IndicatorStats>& stats,
                                   const ScreeningThresholds& thresholds);

/// Floors/ceiling from the across-indicator distribution of each statistic:
/// mean - 2 sd for mean and full-score frequency, mean + 2 sd for CV.
ScreeningThresholds derive_thresholds(const std::map<std::string, IndicatorStats>& stats);

/// Full statistics for one round. Non-responding experts count towards the
/// positivity denominator only; Ca/Cs cover responding experts.
RoundConsensus analyze_round(const RatingRound& round, std::span<const ExpertProfile> panel,
                             const AuthorityTables& tables = {}, bool correct_ties = true);

}  // namespace stage
