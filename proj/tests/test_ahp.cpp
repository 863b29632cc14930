#include <numeric>

#include "check_error.hpp"
#include "oracles.hpp"
#include "stage/ahp.hpp"

using namespace stage;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

PairwiseMatrix pm(const oracle::Grid& g) { return PairwiseMatrix(ids(g.size()), Matrix<double>::from_rows(g)); }

oracle::Grid consistent(const std::vector<double>& w) {
  oracle::Grid g(w.size(), std::vector<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) g[i][j] = i == j ? 1.0 : w[i] / w[j];
  return g;
}

oracle::Grid random_reciprocal(std::mt19937_64& rng, std::size_t n) {
  static const double scale[] = {1.0 / 9, 1.0 / 8, 1.0 / 7, 1.0 / 6, 1.0 / 5, 1.0 / 4, 1.0 / 3, 1.0 / 2, 1,
                                 2, 3, 4, 5, 6, 7, 8, 9};
  std::uniform_int_distribution<int> pick(0, 16);
  oracle::Grid g(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int k = pick(rng);
      g[i][j] = scale[k];
      g[j][i] = scale[16 - k];
    }
  return g;
}

std::vector<double> normalized(std::vector<double> w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

IndicatorNode node(std::string id, Level level, std::optional<std::string> parent, double w) {
  IndicatorNode n;
  n.id = std::move(id);
  n.name = n.id;
  n.level = level;
  n.parent_id = std::move(parent);
  n.local_weight = w;
  return n;
}

}  // namespace

TEST_CASE("pairwise matrix validation") {
  CHECK_ERROR_KIND(pm({{1, 3}, {0.5, 1}}), ErrorKind::InvalidMatrix);
  CHECK_ERROR_KIND(pm({{2, 3}, {1.0 / 3, 1}}), ErrorKind::InvalidMatrix);
  CHECK_ERROR_KIND(pm({{1, 10}, {0.1, 1}}), ErrorKind::InvalidMatrix);
  CHECK_ERROR_KIND(pm({{1, -2}, {-0.5, 1}}), ErrorKind::InvalidMatrix);
  CHECK_ERROR_KIND(PairwiseMatrix({"a", "a"}, Matrix<double>::from_rows({{1, 1}, {1, 1}})), ErrorKind::InvalidMatrix);
  CHECK_NOTHROW(pm({{1, 1.0 / 9}, {9, 1}}));
}

TEST_CASE("principal weights examples") {
  auto e = principal_weights(pm({{1, 3}, {1.0 / 3, 1}}));
  CHECK(e.weights[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(e.weights[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(e.lambda_max == doctest::Approx(2.0).epsilon(1e-12));

  e = principal_weights(pm({{1, 2, 4}, {0.5, 1, 2}, {0.25, 0.5, 1}}));
  CHECK(std::abs(e.weights[0] - 4.0 / 7) <= 1e-12);
  CHECK(std::abs(e.weights[1] - 2.0 / 7) <= 1e-12);
  CHECK(std::abs(e.weights[2] - 1.0 / 7) <= 1e-12);
  CHECK(std::abs(e.lambda_max - 3.0) <= 1e-12);

  e = principal_weights(pm({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}));
  for (double w : e.weights) CHECK(std::abs(w - 1.0 / 3) <= 1e-15);
}

TEST_CASE("consistency ratio") {
  auto c = consistency_ratio(3.0, 3);
  CHECK(c.ci == 0.0);
  CHECK(c.cr == 0.0);
  CHECK(c.acceptable);
  CHECK(consistency_ratio(2.0, 2).cr == 0.0);
  CHECK(random_index(3) == 0.58);
  CHECK(random_index(9) == 1.45);
  CHECK_ERROR_KIND(random_index(10), ErrorKind::UnsupportedOrder);
  CHECK_ERROR_KIND(consistency_ratio(10.5, 10), ErrorKind::UnsupportedOrder);

  const oracle::Grid perturbed{{1, 2, 4}, {0.5, 1, 3}, {0.25, 1.0 / 3, 1}};
  const auto e = principal_weights(pm(perturbed));
  const double lambda = oracle::lambda_max_3x3(perturbed);
  CHECK(std::abs(e.lambda_max - lambda) <= 1e-10);
  c = consistency_ratio(e.lambda_max, 3);
  const double ci = (lambda - 3) / 2;
  CHECK(std::abs(c.ci - ci) <= 1e-10);
  CHECK(std::abs(c.cr - ci / 0.58) <= 1e-10);
  CHECK(c.acceptable == (ci / 0.58 < 0.1));
}

TEST_CASE("importance weights") {
  const std::vector<double> a{6, 2}, b{5, 5, 5}, c{4.2}, bad{3, 0};
  CHECK(importance_weights(a) == std::vector<double>{0.75, 0.25});
  for (double w : importance_weights(b)) CHECK(std::abs(w - 1.0 / 3) <= 1e-15);
  CHECK(importance_weights(c) == std::vector<double>{1.0});
  CHECK_ERROR_KIND(importance_weights(bad), ErrorKind::InvalidInput);
}

TEST_CASE("combine weights") {
  const std::vector<double> s{0.75, 0.25}, h{0.5, 0.5};
  const auto out = combine_weights(s, h);
  CHECK(std::abs(out[0] - 0.75) <= 1e-15);
  CHECK(std::abs(out[1] - 0.25) <= 1e-15);
  const std::vector<double> three{0.2, 0.3, 0.5};
  CHECK_ERROR_KIND(combine_weights(s, three), ErrorKind::InvalidInput);
  const std::vector<double> z1{1, 0}, z2{0, 1};
  CHECK_ERROR_KIND(combine_weights(z1, z2), ErrorKind::Degenerate);
}

TEST_CASE("combine weights: uniform is neutral, rescaling is harmless, oracle agrees") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int> len(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const auto an = normalized(a), bn = normalized(b);
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));

    const auto same = combine_weights(uniform, bn);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(same[i] - bn[i]) <= 1e-12);

    std::vector<double> expected(n);
    for (std::size_t i = 0; i < n; ++i) expected[i] = an[i] * bn[i];
    expected = normalized(expected);
    const auto got = combine_weights(an, bn);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - expected[i]) <= 1e-12);

    auto scaled = a;
    for (auto& x : scaled) x *= 37.5;
    const auto rescaled = combine_weights(scaled, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rescaled[i] - expected[i]) <= 1e-12);
  }
}

TEST_CASE("consistent matrices recover their generating weights") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(1.0, 9.0);
  std::uniform_int_distribution<int> len(2, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng);
    // keep every ratio inside [1/9, 9]
    const auto g = consistent(w);
    const auto e = principal_weights(pm(g));
    const auto expected = normalized(w);
    const auto geo = oracle::geometric_mean_weights(g);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(e.weights[i] - expected[i]) <= 1e-9);
      CHECK(std::abs(e.weights[i] - geo[i]) <= 1e-12);
    }
    CHECK(std::abs(consistency_ratio(e.lambda_max, n).cr) <= 1e-9);
  }
}

TEST_CASE("lambda max is at least n and weights are permutation equivariant") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> len(2, 9);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    const auto g = random_reciprocal(rng, n);
    const auto e = principal_weights(pm(g));
    CHECK(e.lambda_max >= static_cast<double>(n) - 1e-9);
    CHECK(std::abs(std::accumulate(e.weights.begin(), e.weights.end(), 0.0) - 1.0) <= 1e-12);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    oracle::Grid p(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i][j] = g[perm[i]][perm[j]];
    const auto ep = principal_weights(pm(p));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ep.weights[i] - e.weights[perm[i]]) <= 1e-9);
  }
}

TEST_CASE("reordered matrices follow their ids") {
  const PairwiseMatrix m({"a", "b", "c"}, Matrix<double>::from_rows({{1, 2, 4}, {0.5, 1, 3}, {0.25, 1.0 / 3, 1}}));
  const auto r = m.reordered({"c", "a", "b"});
  CHECK(r.ids() == std::vector<std::string>{"c", "a", "b"});
  CHECK(r.entries()(0, 1) == 0.25);
  CHECK(r.entries()(1, 2) == 2);
  CHECK_ERROR_KIND(m.reordered({"a", "b", "z"}), ErrorKind::InvalidInput);
}

TEST_CASE("compose_global examples") {
  SUBCASE("single level") {
    const IndicatorTree t({node("a", Level::Dimension, std::nullopt, 0.4), node("b", Level::Dimension, std::nullopt, 0.6)});
    const auto w = compose_global(t);
    CHECK(w.find("a")->global == 0.4);
    CHECK(w.find("b")->global == 0.6);
  }
  SUBCASE("two by two") {
    const IndicatorTree t({node("a", Level::Dimension, std::nullopt, 0.5), node("b", Level::Dimension, std::nullopt, 0.5),
                           node("a.x", Level::Index, "a", 0.5), node("a.y", Level::Index, "a", 0.5),
                           node("b.x", Level::Index, "b", 0.5), node("b.y", Level::Index, "b", 0.5)});
    const auto w = compose_global(t);
    for (const char* id : {"a.x", "a.y", "b.x", "b.y"}) CHECK(w.find(id)->global == 0.25);
  }
  SUBCASE("missing weight") {
    auto b = node("b", Level::Dimension, std::nullopt, 0.5);
    b.local_weight.reset();
    const IndicatorTree t({node("a", Level::Dimension, std::nullopt, 0.5), b});
    CHECK_ERROR_KIND(compose_global(t), ErrorKind::IncompleteWeights);
  }
}

TEST_CASE("compose_global on the default tree") {
  const auto tree = default_indicator_tree().with_local_weights(synthetic_demo_weights());
  const auto w = compose_global(tree);
  double leaves = 0;
  for (const auto& n : tree.nodes()) {
    if (!n.bonus && tree.is_leaf(n.id)) leaves += w.find(n.id)->global.value();
    const auto kids = tree.children(n.id);
    if (kids.empty()) continue;
    double sum = 0;
    for (const auto* k : kids) sum += w.find(k->id)->global.value();
    CHECK(std::abs(sum - w.find(n.id)->global.value()) <= 1e-12);
  }
  CHECK(std::abs(leaves - 1.0) <= 1e-9);
}

TEST_CASE("derive_weights per method") {
  const IndicatorTree tree({node("a", Level::Dimension, std::nullopt, 0), node("b", Level::Dimension, std::nullopt, 0),
                            node("a.i", Level::Index, "a", 0)});
  const auto bare = IndicatorTree([&] {
    auto nodes = tree.nodes();
    for (auto& n : nodes) n.local_weight.reset();
    return nodes;
  }());
  const std::vector<PairwiseMatrix> mats{PairwiseMatrix({"b", "a"}, Matrix<double>::from_rows({{1, 1.0 / 3}, {3, 1}}))};
  const std::map<std::string, double> means{{"a", 2.0}, {"b", 6.0}, {"a.i", 4.0}};

  auto w = derive_weights(bare, mats, means, WeightMethod::Ahp);
  CHECK(w.find("a")->local == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w.find("a.i")->local == 1.0);
  REQUIRE(w.matrices.size() == 1);
  CHECK(w.matrices[0].group == "<root>");

  w = derive_weights(bare, mats, means, WeightMethod::Scoring);
  CHECK(w.find("a")->local == doctest::Approx(0.25).epsilon(1e-12));

  w = derive_weights(bare, mats, means, WeightMethod::Combined);
  CHECK(w.find("a")->local == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.find("a.i")->global.value() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_ERROR_KIND(derive_weights(bare, {}, means, WeightMethod::Ahp), ErrorKind::IncompleteWeights);
  CHECK_ERROR_KIND(derive_weights(bare, mats, {}, WeightMethod::Scoring), ErrorKind::IncompleteWeights);
}

TEST_CASE("weight method names") {
  CHECK(parse_weight_method("combined") == WeightMethod::Combined);
  CHECK(parse_weight_method("AHP") == WeightMethod::Ahp);
  CHECK_FALSE(parse_weight_method("magic").has_value());
}
