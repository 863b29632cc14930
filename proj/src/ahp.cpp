#include "stage/ahp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "stage/text.hpp"

namespace stage {

namespace {

constexpr double kReciprocalTolerance = 1e-9;
constexpr double kSumTolerance = 1e-9;
constexpr std::size_t kMaxOrder = 15;

std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

PairwiseMatrix::PairwiseMatrix(std::vector<std::string> ids, Matrix<double> entries)
    : ids_(std::move(ids)), entries_(std::move(entries)) {
  const std::size_t n = ids_.size();
  if (entries_.rows() != n || entries_.cols() != n) {
    fail(ErrorKind::InvalidMatrix, "pairwise matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (std::set<std::string>(ids_.begin(), ids_.end()).size() != n) {
    fail(ErrorKind::InvalidMatrix, "pairwise matrix has duplicate ids");
  }
  const double lo = 1.0 / 9.0 - kReciprocalTolerance;
  const double hi = 9.0 + kReciprocalTolerance;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = entries_(i, j);
      const std::string where = "(" + ids_[i] + ", " + ids_[j] + ")";
      if (!std::isfinite(a) || a <= 0.0) fail(ErrorKind::InvalidMatrix, "non-positive entry at " + where);
      if (i == j && std::abs(a - 1.0) > kReciprocalTolerance) {
        fail(ErrorKind::InvalidMatrix, "diagonal entry at " + where + " is not 1");
      }
      if (a < lo || a > hi) fail(ErrorKind::InvalidMatrix, "entry at " + where + " outside [1/9, 9]");
      if (std::abs(a * entries_(j, i) - 1.0) > kReciprocalTolerance) {
        fail(ErrorKind::InvalidMatrix, "entries at " + where + " are not reciprocal");
      }
    }
  }
}

PairwiseMatrix PairwiseMatrix::reordered(const std::vector<std::string>& order) const {
  const std::size_t n = ids_.size();
  if (order.size() != n) fail(ErrorKind::InvalidInput, "reorder: id count mismatch");
  std::vector<std::size_t> pos(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto it = std::find(ids_.begin(), ids_.end(), order[k]);
    if (it == ids_.end()) fail(ErrorKind::InvalidInput, "reorder: unknown id '" + order[k] + "'");
    pos[k] = static_cast<std::size_t>(it - ids_.begin());
  }
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = entries_(pos[i], pos[j]);
  return PairwiseMatrix(order, std::move(m));
}

PrincipalEigen principal_weights(const PairwiseMatrix& pm) {
  const std::size_t n = pm.size();
  if (n < 2 || n > kMaxOrder) {
    fail(ErrorKind::InvalidMatrix, "AHP matrix order must be between 2 and 15, got " + std::to_string(n));
  }
  const auto& a = pm.entries();
  auto multiply = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
  };

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  PrincipalEigen out;
  bool converged = false;
  for (std::size_t it = 1; it <= kPowerIterationCap; ++it) {
    std::vector<double> next = normalized(multiply(x));
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - x[i]));
    x = std::move(next);
    out.iterations = it;
    if (diff < kPowerIterationTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(ErrorKind::Numeric, "power iteration did not converge after " +
                                 std::to_string(out.iterations) + " iterations");
  }

  const auto ax = multiply(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += x[i] * ax[i];
    den += x[i] * x[i];
  }
  out.lambda_max = num / den;
  out.weights = std::move(x);
  return out;
}

double random_index(std::size_t n) {
  static constexpr std::array<double, 10> kRandomIndex{0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45};
  if (n == 0 || n >= kRandomIndex.size()) {
    fail(ErrorKind::UnsupportedOrder, "no random index for order " + std::to_string(n));
  }
  return kRandomIndex[n];
}

Consistency consistency_ratio(double lambda_max, std::size_t n) {
  if (n < 2) fail(ErrorKind::InvalidInput, "consistency needs order >= 2");
  const double nd = static_cast<double>(n);
  if (!(lambda_max >= nd - 1e-9)) {
    fail(ErrorKind::InvalidInput, "lambda_max " + format_shortest(lambda_max) + " below order " +
                                      std::to_string(n));
  }
  const double ri = random_index(n);
  Consistency c;
  c.ci = (lambda_max - nd) / (nd - 1.0);
  c.cr = n <= 2 ? 0.0 : c.ci / ri;
  c.acceptable = c.cr < 0.1;
  return c;
}

std::vector<double> importance_weights(std::span<const double> means) {
  if (means.empty()) fail(ErrorKind::InvalidInput, "no importance means");
  for (double m : means) {
    if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::InvalidInput, "importance means must be positive");
  }
  return normalized(std::vector<double>(means.begin(), means.end()));
}

std::vector<double> combine_weights(std::span<const double> scoring, std::span<const double> ahp) {
  if (scoring.size() != ahp.size() || scoring.empty()) {
    fail(ErrorKind::InvalidInput, "weight vectors differ in length");
  }
  std::vector<double> product(scoring.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scoring.size(); ++i) {
    if (scoring[i] < 0.0 || ahp[i] < 0.0) fail(ErrorKind::InvalidInput, "weights must be non-negative");
    product[i] = scoring[i] * ahp[i];
    sum += product[i];
  }
  if (!(sum > 0.0)) fail(ErrorKind::Degenerate, "all weight products are zero");
  for (double& p : product) p /= sum;
  return product;
}

std::string_view to_string(WeightMethod method) {
  switch (method) {
    case WeightMethod::Ahp: return "ahp";
    case WeightMethod::Scoring: return "scoring";
    case WeightMethod::Combined: return "combined";
  }
  return "combined";
}

std::optional<WeightMethod> parse_weight_method(std::string_view text) {
  const auto t = normalize_token(text);
  if (t == "ahp") return WeightMethod::Ahp;
  if (t == "scoring") return WeightMethod::Scoring;
  if (t == "combined") return WeightMethod::Combined;
  return std::nullopt;
}

const NodeWeight* WeightTable::find(std::string_view id) const {
  auto it = nodes.find(std::string(id));
  return it == nodes.end() ? nullptr : &it->second;
}

WeightTable compose_global(const IndicatorTree& tree) {
  WeightTable table;
  for (const auto& g : tree.sibling_groups()) {
    double sum = 0.0;
    std::size_t weighted = 0;
    for (const auto& id : g.members) {
      if (const auto w = tree.find(id)->local_weight) {
        sum += *w;
        ++weighted;
      }
    }
    if (weighted == 0 && g.bonus) continue;
    if (weighted != g.members.size()) {
      fail(ErrorKind::IncompleteWeights, "sibling group '" + g.key() + "' is missing local weights");
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      fail(ErrorKind::InvalidInput, "local weights under '" + g.key() + "' sum to " + format_shortest(sum));
    }
    for (const auto& id : g.members) table.nodes[id].local = *tree.find(id)->local_weight;
  }

  for (auto& [id, w] : table.nodes) {
    double global = 1.0;
    const IndicatorNode* cur = tree.find(id);
    bool complete = true;
    for (std::size_t depth = 0; cur != nullptr; ++depth) {
      if (depth > tree.size()) fail(ErrorKind::InvalidInput, "cyclic parent chain at '" + id + "'");
      auto it = table.nodes.find(cur->id);
      if (it == table.nodes.end()) {
        complete = false;
        break;
      }
      global *= it->second.local;
      cur = cur->parent_id ? tree.find(*cur->parent_id) : nullptr;
    }
    if (complete) w.global = global;
  }

  double leaf_sum = 0.0;
  bool any_leaf = false;
  for (const auto& n : tree.nodes()) {
    if (n.bonus || !tree.is_leaf(n.id)) continue;
    const auto* w = table.find(n.id);
    if (w == nullptr || !w->global) {
      fail(ErrorKind::IncompleteWeights, "leaf '" + n.id + "' has no global weight");
    }
    leaf_sum += *w->global;
    any_leaf = true;
  }
  if (any_leaf && std::abs(leaf_sum - 1.0) > kSumTolerance) {
    fail(ErrorKind::Numeric, "core leaf weights sum to " + format_shortest(leaf_sum));
  }
  return table;
}

WeightTable derive_weights(const IndicatorTree& tree, std::span<const PairwiseMatrix> matrices,
                           const std::map<std::string, double>& importance_means,
                           WeightMethod method) {
  std::map<std::string, double> local;
  std::vector<GroupConsistency> reports;

  for (const auto& g : tree.sibling_groups()) {
    if (g.members.size() == 1) {
      local[g.members.front()] = 1.0;
      continue;
    }
    const std::set<std::string> members(g.members.begin(), g.members.end());

    std::optional<std::vector<double>> ahp;
    if (method != WeightMethod::Scoring) {
      for (const auto& m : matrices) {
        if (std::set<std::string>(m.ids().begin(), m.ids().end()) != members) continue;
        const auto eig = principal_weights(m.reordered(g.members));
        const auto c = consistency_ratio(eig.lambda_max, g.members.size());
        reports.push_back({g.key(), g.members.size(), eig.lambda_max, c.ci, c.cr, c.acceptable});
        ahp = eig.weights;
        break;
      }
    }

    std::optional<std::vector<double>> scoring;
    if (method != WeightMethod::Ahp) {
      std::vector<double> means;
      for (const auto& id : g.members) {
        auto it = importance_means.find(id);
        if (it == importance_means.end()) break;
        means.push_back(it->second);
      }
      if (means.size() == g.members.size()) scoring = importance_weights(means);
    }

    std::optional<std::vector<double>> weights;
    switch (method) {
      case WeightMethod::Ahp: weights = ahp; break;
      case WeightMethod::Scoring: weights = scoring; break;
      case WeightMethod::Combined:
        if (ahp && scoring) weights = combine_weights(*scoring, *ahp);
        break;
    }
    if (!weights) {
      if (g.bonus) continue;
      std::string need;
      if (method != WeightMethod::Scoring && !ahp) need = "a pairwise matrix";
      if (method != WeightMethod::Ahp && !scoring) need += std::string(need.empty() ? "" : " and ") + "importance means";
      fail(ErrorKind::IncompleteWeights, "sibling group '" + g.key() + "' needs " + need);
    }
    for (std::size_t i = 0; i < g.members.size(); ++i) local[g.members[i]] = (*weights)[i];
  }

  WeightTable table = compose_global(tree.with_local_weights(local));
  table.method = method;
  table.matrices = std::move(reports);
  return table;
}

}  // namespace stage
