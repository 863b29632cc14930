#include "stage/psychometrics.hpp"

#include <cmath>

namespace stage {

namespace {

double sample_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

void require_complete(const Matrix<double>& scores) {
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (double v : scores.row(r)) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "score matrix has missing values");
    }
  }
}

std::vector<double> row_totals(const Matrix<double>& scores, std::optional<std::size_t> skip = {}) {
  std::vector<double> totals(scores.rows(), 0.0);
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      if (c != skip) totals[r] += scores(r, c);
    }
  }
  return totals;
}

}  // namespace

double cronbach_alpha(const Matrix<double>& scores) {
  if (scores.rows() < 2 || scores.cols() < 2) {
    fail(ErrorKind::InvalidInput, "Cronbach's alpha needs at least 2 respondents and 2 items");
  }
  require_complete(scores);
  const double k = static_cast<double>(scores.cols());
  double item_var = 0.0;
  for (std::size_t c = 0; c < scores.cols(); ++c) item_var += sample_variance(scores.column(c));
  const double total_var = sample_variance(row_totals(scores));
  if (!(total_var > 0.0)) fail(ErrorKind::Degenerate, "total score has zero variance");
  return k / (k - 1.0) * (1.0 - item_var / total_var);
}

double corrected_item_total(const Matrix<double>& scores, std::size_t item) {
  if (item >= scores.cols()) fail(ErrorKind::InvalidInput, "item index out of range");
  if (scores.rows() < 2 || scores.cols() < 2) {
    fail(ErrorKind::InvalidInput, "item-total correlation needs at least 2 respondents and 2 items");
  }
  require_complete(scores);
  const auto x = scores.column(item);
  const auto rest = row_totals(scores, item);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += rest[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (rest[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (rest[i] - my) * (rest[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::UndefinedCorrelation, "item column is constant");
  if (!(syy > 0.0)) fail(ErrorKind::UndefinedCorrelation, "rest score is constant");
  return sxy / std::sqrt(sxx * syy);
}

double alpha_if_deleted(const Matrix<double>& scores, std::size_t item) {
  if (scores.cols() < 3) fail(ErrorKind::InsufficientItems, "alpha-if-deleted needs at least 3 items");
  if (item >= scores.cols()) fail(ErrorKind::InvalidInput, "item index out of range");
  return cronbach_alpha(scores.without_column(item));
}

double i_cvi(std::span<const int> ratings, int relevance_floor) {
  if (ratings.empty()) fail(ErrorKind::InvalidInput, "I-CVI needs at least one rating");
  std::size_t relevant = 0;
  for (int r : ratings) {
    if (r < kImportanceMin || r > kImportanceMax) {
      fail(ErrorKind::InvalidInput, "importance rating " + std::to_string(r) + " outside 1..7");
    }
    if (r >= relevance_floor) ++relevant;
  }
  return static_cast<double>(relevant) / static_cast<double>(ratings.size());
}

double s_cvi(std::span<const double> i_cvis) {
  if (i_cvis.empty()) fail(ErrorKind::InvalidInput, "S-CVI needs at least one item");
  double sum = 0.0;
  for (double v : i_cvis) sum += v;
  return sum / static_cast<double>(i_cvis.size());
}

ReliabilityTable reliability_report(const ConsumerResponses& responses, const Instrument& instrument) {
  check_responses(responses);
  ReliabilityTable table;

  // column position of every instrument question in the response set
  std::vector<std::size_t> column_of(instrument.questions.size());
  for (std::size_t q = 0; q < instrument.questions.size(); ++q) {
    const auto& id = instrument.questions[q].id;
    std::size_t c = 0;
    while (c < responses.question_ids.size() && responses.question_ids[c] != id) ++c;
    if (c == responses.question_ids.size()) fail(ErrorKind::InvalidInput, "responses lack question '" + id + "'");
    column_of[q] = c;
  }

  std::vector<std::vector<double>> complete;
  for (std::size_t r = 0; r < responses.answers.size(); ++r) {
    std::vector<double> row;
    bool ok = true;
    for (std::size_t q = 0; q < column_of.size() && ok; ++q) {
      const auto& a = responses.answers[r][column_of[q]];
      if (!a) ok = false;
      else row.push_back(static_cast<double>(*a));
    }
    if (ok) complete.push_back(std::move(row));
    else table.excluded_respondents.push_back(responses.respondent_ids[r]);
  }
  table.respondents_used = complete.size();
  if (complete.size() < 2) {
    fail(ErrorKind::InsufficientData, "reliability needs at least 2 respondents with complete answers");
  }
  const auto all = Matrix<double>::from_rows(complete);

  try {
    table.total_alpha = cronbach_alpha(all);
  } catch (const Error& e) {
    table.total_error = e.what();
  }

  for (const auto& idx : instrument.indices) {
    IndexReliability ir;
    ir.index_id = idx.id;
    Matrix<double> sub(all.rows(), idx.question_ids.size());
    for (std::size_t k = 0; k < idx.question_ids.size(); ++k) {
      const std::size_t q = instrument.question_position(idx.question_ids[k]);
      for (std::size_t r = 0; r < all.rows(); ++r) sub(r, k) = all(r, q);
    }
    try {
      ir.alpha = cronbach_alpha(sub);
    } catch (const Error& e) {
      ir.error = e.what();
    }
    for (std::size_t k = 0; k < idx.question_ids.size(); ++k) {
      QuestionReliability qr;
      qr.question_id = idx.question_ids[k];
      try {
        qr.citc = corrected_item_total(sub, k);
        qr.flag_low_citc = *qr.citc < kCitcFlagBelow;
      } catch (const Error& e) {
        qr.review = true;
        qr.note = e.what();
      }
      if (sub.cols() >= 3) {
        try {
          qr.alpha_if_deleted = alpha_if_deleted(sub, k);
        } catch (const Error& e) {
          if (!qr.note.empty()) qr.note += "; ";
          qr.note += e.what();
        }
      }
      ir.questions.push_back(std::move(qr));
    }
    table.indices.push_back(std::move(ir));
  }
  return table;
}

ValidityTable validity_report(const Matrix<int>& importance, const std::vector<std::string>& item_ids,
                              int relevance_floor) {
  if (importance.rows() < 1 || importance.cols() < 1) {
    fail(ErrorKind::InvalidInput, "validity needs at least one rater and one item");
  }
  if (item_ids.size() != importance.cols()) {
    fail(ErrorKind::InvalidInput, "item ids do not match the importance matrix");
  }
  ValidityTable table;
  table.relevance_floor = relevance_floor;
  table.raters = importance.rows();
  std::vector<double> cvis;
  for (std::size_t c = 0; c < importance.cols(); ++c) {
    const auto column = importance.column(c);
    ItemValidity iv;
    iv.item_id = item_ids[c];
    iv.i_cvi = i_cvi(column, relevance_floor);
    double sum = 0.0;
    for (int v : column) sum += v;
    iv.importance_mean = sum / static_cast<double>(column.size());
    iv.pass = iv.i_cvi >= kICviPass;
    cvis.push_back(iv.i_cvi);
    table.items.push_back(std::move(iv));
  }
  table.s_cvi = s_cvi(cvis);
  table.s_cvi_pass = table.s_cvi >= kSCviPass;
  return table;
}

}  // namespace stage
