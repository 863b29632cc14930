#include "stage/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stage {

namespace {

constexpr double kUnitTolerance = 1e-12;

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void require_panel(std::span<const ExpertProfile> panel) {
  if (panel.empty()) fail(ErrorKind::InvalidInput, "expert panel is empty");
}

}  // namespace

JudgmentTable default_judgment_table() {
  return {{
      {0.3, 0.2, 0.1},  // theoretical analysis
      {0.5, 0.4, 0.3},  // practical experience
      {0.1, 0.1, 0.1},  // peer reference
      {0.1, 0.1, 0.1},  // intuition
  }};
}

FamiliarityMap default_familiarity_map() { return {1.0, 0.8, 0.6, 0.4, 0.2}; }

double positivity_coefficient(std::size_t distributed, std::size_t returned) {
  if (distributed == 0) fail(ErrorKind::InvalidInput, "no questionnaires distributed");
  if (returned > distributed) {
    fail(ErrorKind::InvalidInput, "returned questionnaires (" + std::to_string(returned) +
                                      ") exceed distributed (" + std::to_string(distributed) + ")");
  }
  return static_cast<double>(returned) / static_cast<double>(distributed);
}

double judgment_coefficient(std::span<const ExpertProfile> panel, const JudgmentTable& table) {
  require_panel(panel);
  double total = 0.0;
  for (const auto& expert : panel) {
    double ca = 0.0;
    for (std::size_t b = 0; b < kBasisCount; ++b) {
      ca += table[b][static_cast<std::size_t>(expert.judgment_basis[b])];
    }
    total += ca;
  }
  return total / static_cast<double>(panel.size());
}

double familiarity_coefficient(std::span<const ExpertProfile> panel, const FamiliarityMap& map) {
  require_panel(panel);
  double total = 0.0;
  for (const auto& expert : panel) total += map[static_cast<std::size_t>(expert.familiarity)];
  return total / static_cast<double>(panel.size());
}

double authority_coefficient(double ca, double cs) {
  auto in_unit = [](double v) { return v >= -kUnitTolerance && v <= 1.0 + kUnitTolerance; };
  if (!in_unit(ca) || !in_unit(cs)) {
    fail(ErrorKind::InvalidInput, "Ca and Cs must lie in [0,1]");
  }
  return (ca + cs) / 2.0;
}

IndicatorStats indicator_stats(std::span<const int> ratings, int scale_max) {
  if (ratings.size() < 2) {
    fail(ErrorKind::InsufficientData, "indicator statistics need at least 2 ratings");
  }
  std::vector<double> xs;
  xs.reserve(ratings.size());
  std::size_t full = 0;
  for (int r : ratings) {
    if (r < 1 || r > scale_max) {
      fail(ErrorKind::InvalidInput, "rating " + std::to_string(r) + " outside [1, " +
                                        std::to_string(scale_max) + "]");
    }
    xs.push_back(static_cast<double>(r));
    if (r == scale_max) ++full;
  }
  IndicatorStats s;
  s.n = xs.size();
  s.mean = mean_of(xs);
  s.sd = sample_sd(xs, s.mean);
  s.cv = s.sd / s.mean;
  s.full_score_freq = static_cast<double>(full) / static_cast<double>(xs.size());
  return s;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double kendalls_w(const Matrix<double>& ratings, bool correct_ties) {
  const std::size_t m = ratings.rows();
  const std::size_t n = ratings.cols();
  if (m < 2 || n < 2) {
    fail(ErrorKind::InvalidInput, "Kendall's W needs at least 2 raters and 2 indicators");
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (double v : ratings.row(r)) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "Kendall's W needs a complete matrix");
    }
  }

  std::vector<double> rank_sums(n, 0.0);
  double tie_total = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const auto row = ratings.row(r);
    const auto ranks = mid_ranks(row);
    for (std::size_t j = 0; j < n; ++j) rank_sums[j] += ranks[j];

    // tie groups of this rater: sum of t^3 - t
    std::vector<double> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_total += t * t * t - t;
      i = j + 1;
    }
  }

  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double mean_rank_sum = md * (nd + 1.0) / 2.0;
  double s = 0.0;
  for (double rs : rank_sums) s += (rs - mean_rank_sum) * (rs - mean_rank_sum);

  double denom = md * md * (nd * nd * nd - nd);
  if (correct_ties) denom -= md * tie_total;
  if (!(denom > 0.0)) {
    fail(ErrorKind::Degenerate, "Kendall's W undefined: every rater tied every indicator");
  }
  return 12.0 * s / denom;
}

double kendalls_w(const Matrix<int>& ratings, bool correct_ties) {
  return kendalls_w(ratings.cast<double>(), correct_ties);
}

ScreeningOutcome screen_indicators(const std::map<std::string, IndicatorStats>& stats,
                                   const ScreeningThresholds& thresholds) {
  ScreeningOutcome out;
  for (const auto& [id, s] : stats) {
    std::vector<std::string> reasons;
    if (!(s.mean >= thresholds.mean_floor())) reasons.emplace_back("mean");
    if (!(s.full_score_freq >= thresholds.fsf_floor())) reasons.emplace_back("fsf");
    if (!(s.cv <= thresholds.cv_ceiling())) reasons.emplace_back("cv");
    if (reasons.empty()) {
      out.retained.push_back(id);
    } else {
      out.dropped.push_back({id, std::move(reasons)});
    }
  }
  return out;
}

ScreeningThresholds derive_thresholds(const std::map<std::string, IndicatorStats>& stats) {
  if (stats.size() < 2) {
    fail(ErrorKind::InsufficientData, "threshold derivation needs at least 2 indicators");
  }
  std::vector<double> means, fsfs, cvs;
  for (const auto& [id, s] : stats) {
    means.push_back(s.mean);
    fsfs.push_back(s.full_score_freq);
    cvs.push_back(s.cv);
  }
  const double mm = mean_of(means);
  const double fm = mean_of(fsfs);
  const double cm = mean_of(cvs);
  const double fsf_floor = std::clamp(fm - 2.0 * sample_sd(fsfs, fm), 0.0, 1.0);
  const double cv_ceiling = std::max(cm + 2.0 * sample_sd(cvs, cm), 0.0);
  return ScreeningThresholds(mm - 2.0 * sample_sd(means, mm), fsf_floor, cv_ceiling);
}

RoundConsensus analyze_round(const RatingRound& round, std::span<const ExpertProfile> panel,
                             const AuthorityTables& tables, bool correct_ties) {
  RoundConsensus rc;
  rc.round_no = round.round_no();
  rc.scale_max = round.scale_max();
  rc.distributed = round.distributed();
  rc.returned = round.returned();
  rc.positivity = positivity_coefficient(rc.distributed, rc.returned);
  rc.tie_corrected = correct_ties;

  std::vector<ExpertProfile> responders;
  for (const auto& id : round.responding_experts()) {
    auto it = std::find_if(panel.begin(), panel.end(), [&](const ExpertProfile& p) { return p.id == id; });
    if (it == panel.end()) fail(ErrorKind::InvalidInput, "expert '" + id + "' has no profile");
    responders.push_back(*it);
  }
  rc.ca = judgment_coefficient(responders, tables.judgment);
  rc.cs = familiarity_coefficient(responders, tables.familiarity);
  rc.cr = authority_coefficient(rc.ca, rc.cs);

  const Matrix<int> m = round.responding_matrix();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto column = m.column(j);
    rc.indicators.emplace(round.indicator_ids()[j], indicator_stats(column, round.scale_max()));
  }
  rc.kendall_w = kendalls_w(m, correct_ties);
  return rc;
}

}  // namespace stage
