#pragma once

// Indicator weighting: principal-eigenvector AHP weights with consistency
// checks, expert-scoring weights, their product combination, and composition
// of global weights down the indicator hierarchy.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stage/matrix.hpp"
#include "stage/model.hpp"

namespace stage {

/// Reciprocal comparison matrix over sibling indicators. Construction throws
/// InvalidMatrix unless a_ii = 1, a_ij * a_ji = 1 (1e-9) and every entry lies
/// in [1/9, 9].
class PairwiseMatrix {
 public:
  PairwiseMatrix(std::vector<std::string> ids, Matrix<double> entries);

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix<double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return ids_.size(); }

  /// Matrix with rows/columns reordered so that ids() == order.
  PairwiseMatrix reordered(const std::vector<std::string>& order) const;

 private:
  std::vector<std::string> ids_;
  Matrix<double> entries_;
};

struct PrincipalEigen {
  std::vector<double> weights;
  double lambda_max = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kPowerIterationTolerance = 1e-12;
inline constexpr std::size_t kPowerIterationCap = 10'000;

PrincipalEigen principal_weights(const PairwiseMatrix& m);

struct Consistency {
  double ci = 0.0;
  double cr = 0.0;
  bool acceptable = true;  // CR < 0.1
};

/// Saaty random index for orders 1..9.
double random_index(std::size_t n);

Consistency consistency_ratio(double lambda_max, std::size_t n);

std::vector<double> importance_weights(std::span<const double> means);

std::vector<double> combine_weights(std::span<const double> scoring, std::span<const double> ahp);

struct NodeWeight {
  double local = 0.0;
  std::optional<double> global;

  bool operator==(const NodeWeight&) const = default;
};

struct GroupConsistency {
  std::string group;  // SiblingGroup::key()
  std::size_t n = 0;
  double lambda_max = 0.0;
  double ci = 0.0;
  double cr = 0.0;
  bool acceptable = true;
};

enum class WeightMethod { Ahp, Scoring, Combined };

std::string_view to_string(WeightMethod method);
std::optional<WeightMethod> parse_weight_method(std::string_view text);

struct WeightTable {
  WeightMethod method = WeightMethod::Combined;
  std::map<std::string, NodeWeight> nodes;
  std::vector<GroupConsistency> matrices;

  const NodeWeight* find(std::string_view id) const;
};

/// Global weight of every node = product of local weights from its root
/// dimension. Requires every core sibling group to be fully weighted and to
/// sum to 1; bonus groups are composed only where weighted.
WeightTable compose_global(const IndicatorTree& tree);

/// Local weights for every sibling group from pairwise matrices (matched by
/// member ids) and/or importance means, then composed. Singleton groups get
/// weight 1. Groups without the inputs the method needs raise
/// IncompleteWeights unless they are bonus groups, which are then left out.
WeightTable derive_weights(const IndicatorTree& tree, std::span<const PairwiseMatrix> matrices,
                           const std::map<std::string, double>& importance_means,
                           WeightMethod method);

}  // namespace stage
