#include "stage/scoring.hpp"

#include <cmath>

#include "stage/text.hpp"

namespace stage {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

double local_weight(const WeightTable& weights, const std::string& id) {
  const auto* w = weights.find(id);
  if (w == nullptr) fail(ErrorKind::IncompleteWeights, "no weight for '" + id + "'");
  return w->local;
}

}  // namespace

ConsumerScores score_consumer(const ConsumerResponses& responses, const Instrument& instrument,
                              const WeightTable& weights) {
  check_responses(responses);
  if (responses.answers.empty()) fail(ErrorKind::InvalidInput, "no respondents to score");
  const std::size_t n_resp = responses.answers.size();

  std::vector<std::size_t> column_of(instrument.questions.size());
  for (std::size_t q = 0; q < instrument.questions.size(); ++q) {
    const auto& id = instrument.questions[q].id;
    std::size_t c = 0;
    while (c < responses.question_ids.size() && responses.question_ids[c] != id) ++c;
    if (c == responses.question_ids.size()) fail(ErrorKind::InvalidInput, "responses lack question '" + id + "'");
    column_of[q] = c;
  }

  // normalized answers with per-question mean imputation
  ConsumerScores out;
  Matrix<double> value(n_resp, instrument.questions.size());
  std::vector<bool> imputed(n_resp, false);
  for (std::size_t q = 0; q < column_of.size(); ++q) {
    double sum = 0.0;
    std::size_t answered = 0;
    for (std::size_t r = 0; r < n_resp; ++r) {
      if (const auto& a = responses.answers[r][column_of[q]]) {
        sum += static_cast<double>(*a);
        ++answered;
      }
    }
    if (answered == 0) {
      fail(ErrorKind::InsufficientData, "nobody answered question '" + instrument.questions[q].id + "'");
    }
    const double fill = sum / static_cast<double>(answered);
    const double span = static_cast<double>(instrument.questions[q].max_value - instrument.questions[q].min_value);
    for (std::size_t r = 0; r < n_resp; ++r) {
      const auto& a = responses.answers[r][column_of[q]];
      const double raw = a ? static_cast<double>(*a) : fill;
      if (!a) {
        imputed[r] = true;
        ++out.imputed_answers;
      }
      value(r, q) = (raw - instrument.questions[q].min_value) / span;
    }
  }

  for (const auto& d : instrument.dimensions) {
    double sum = 0.0;
    for (const auto& idx : instrument.indices) {
      if (idx.dimension_id == d.id) sum += local_weight(weights, idx.id);
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      fail(ErrorKind::InvalidInput, "index weights under '" + d.id + "' sum to " + format_shortest(sum));
    }
    out.dimensions.push_back({d.id, local_weight(weights, d.id), 0.0});
  }

  for (std::size_t r = 0; r < n_resp; ++r) {
    RespondentScore rs;
    rs.respondent_id = responses.respondent_ids[r];
    rs.imputed = imputed[r];
    for (const auto& d : instrument.dimensions) {
      double score = 0.0;
      for (const auto& idx : instrument.indices) {
        if (idx.dimension_id != d.id) continue;
        double index_score = 0.0;
        for (const auto& qid : idx.question_ids) index_score += value(r, instrument.question_position(qid));
        index_score /= static_cast<double>(idx.question_ids.size());
        score += local_weight(weights, idx.id) * index_score;
      }
      rs.dimension_scores.push_back(score * 100.0);
    }
    for (std::size_t k = 0; k < out.dimensions.size(); ++k) {
      rs.composite += out.dimensions[k].weight * rs.dimension_scores[k];
    }
    out.respondents.push_back(std::move(rs));
  }

  for (std::size_t k = 0; k < out.dimensions.size(); ++k) {
    double sum = 0.0;
    for (const auto& rs : out.respondents) sum += rs.dimension_scores[k];
    out.dimensions[k].score = sum / static_cast<double>(n_resp);
  }
  return out;
}

double score_expert_bonus(const Matrix<int>& bonus, double cap) {
  if (bonus.empty()) fail(ErrorKind::InvalidInput, "no expert bonus ratings");
  if (!(cap > 0.0) || !std::isfinite(cap)) fail(ErrorKind::InvalidInput, "bonus cap must be positive");
  double sum = 0.0;
  for (std::size_t r = 0; r < bonus.rows(); ++r) {
    for (int v : bonus.row(r)) {
      if (v < kAnswerMin || v > kAnswerMax) {
        fail(ErrorKind::InvalidInput, "bonus rating " + std::to_string(v) + " outside 0..4");
      }
      sum += v;
    }
  }
  const double mean = sum / static_cast<double>(bonus.rows() * bonus.cols());
  return mean / static_cast<double>(kAnswerMax - kAnswerMin) * cap;
}

ScoreCard composite(const std::vector<DimensionScore>& dimensions, double bonus, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) fail(ErrorKind::InvalidInput, "bonus cap must be positive");
  if (!(bonus >= 0.0 && bonus <= cap)) fail(ErrorKind::InvalidInput, "bonus outside [0, cap]");
  double weight_sum = 0.0;
  ScoreCard card;
  card.dimensions = dimensions;
  for (const auto& d : dimensions) {
    if (!(d.score >= -kWeightSumTolerance && d.score <= 100.0 + kWeightSumTolerance)) {
      fail(ErrorKind::InvalidInput, "dimension score of '" + d.id + "' outside 0..100");
    }
    if (d.weight < 0.0) fail(ErrorKind::InvalidInput, "negative dimension weight for '" + d.id + "'");
    weight_sum += d.weight;
    card.core_composite += d.weight * d.score;
  }
  if (std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
    fail(ErrorKind::InvalidInput, "dimension weights sum to " + format_shortest(weight_sum));
  }
  card.bonus = bonus;
  card.bonus_cap = cap;
  card.final_score = card.core_composite + bonus;
  card.final_renormalized = card.final_score / (100.0 + cap) * 100.0;
  return card;
}

ScoreCard score_software(const ConsumerResponses& responses, const BonusRatings& bonus,
                         const Instrument& instrument, const WeightTable& weights, double cap) {
  const auto consumer = score_consumer(responses, instrument, weights);
  double bonus_points = 0.0;
  if (!bonus.ratings.empty()) {
    check_bonus_ratings(bonus);
    bonus_points = score_expert_bonus(bonus.ratings, cap);
  }
  ScoreCard card = composite(consumer.dimensions, bonus_points, cap);
  card.respondent_count = consumer.respondents.size();
  for (const auto& r : consumer.respondents) {
    if (r.imputed) card.imputed_respondents.push_back(r.respondent_id);
  }
  return card;
}

}  // namespace stage
