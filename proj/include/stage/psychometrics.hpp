#pragma once

// Reliability (Cronbach's alpha, corrected item-total correlation,
// alpha-if-deleted) and content validity (I-CVI, S-CVI).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stage/matrix.hpp"
#include "stage/model.hpp"

namespace stage {

inline constexpr double kCitcFlagBelow = 0.3;
inline constexpr double kAlphaAcceptable = 0.7;
inline constexpr double kICviPass = 0.78;
inline constexpr double kSCviPass = 0.90;
inline constexpr int kDefaultRelevanceFloor = 5;
inline constexpr int kImportanceMin = 1;
inline constexpr int kImportanceMax = 7;

/// alpha = k/(k-1) * (1 - sum item variances / total-score variance), sample
/// variances. Not clamped; may be negative.
double cronbach_alpha(const Matrix<double>& scores);

/// Pearson correlation of column `item` with the sum of all other columns.
double corrected_item_total(const Matrix<double>& scores, std::size_t item);

/// cronbach_alpha of the matrix with column `item` removed; needs k >= 3.
double alpha_if_deleted(const Matrix<double>& scores, std::size_t item);

double i_cvi(std::span<const int> ratings, int relevance_floor = kDefaultRelevanceFloor);
double s_cvi(std::span<const double> i_cvis);

struct QuestionReliability {
  std::string question_id;
  std::optional<double> citc;              // nullopt when undefined (constant column)
  std::optional<double> alpha_if_deleted;  // nullopt when not applicable (< 3 questions)
  bool flag_low_citc = false;              // citc < 0.3
  bool review = false;                     // citc undefined
  std::string note;
};

struct IndexReliability {
  std::string index_id;
  std::optional<double> alpha;
  std::string error;  // non-empty when alpha could not be computed
  std::vector<QuestionReliability> questions;
};

struct ReliabilityTable {
  std::size_t respondents_used = 0;
  std::vector<std::string> excluded_respondents;  // had missing answers
  std::optional<double> total_alpha;
  std::string total_error;
  std::vector<IndexReliability> indices;
};

/// Per-index and total reliability over respondents with complete answers.
/// Index-level failures are recorded inline; throws InsufficientData only when
/// fewer than 2 complete respondents remain.
ReliabilityTable reliability_report(const ConsumerResponses& responses, const Instrument& instrument);

struct ItemValidity {
  std::string item_id;
  double importance_mean = 0.0;
  double i_cvi = 0.0;
  bool pass = false;  // i_cvi >= 0.78
};

struct ValidityTable {
  int relevance_floor = kDefaultRelevanceFloor;
  std::size_t raters = 0;
  std::vector<ItemValidity> items;
  double s_cvi = 0.0;
  bool s_cvi_pass = false;  // s_cvi >= 0.90
};

/// `importance` is raters x items on the 1..7 scale.
ValidityTable validity_report(const Matrix<int>& importance, const std::vector<std::string>& item_ids,
                              int relevance_floor = kDefaultRelevanceFloor);

}  // namespace stage
