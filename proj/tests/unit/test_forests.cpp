#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "datalearner/forest.hpp"

using namespace datalearner;

namespace {

TreeNode leaf(std::initializer_list<double> counts) {
  TreeNode n;
  n.distribution = ClassDistribution(counts);
  return n;
}

TreeNode split_on(std::size_t attribute, std::vector<TreeNode> children) {
  TreeNode n = leaf({1, 1});
  NodeSplit s;
  s.attribute = attribute;
  s.branch_weights.assign(children.size(), 1.0);
  n.split = s;
  n.children = std::move(children);
  return n;
}

void first_depths(const TreeNode& n, std::size_t depth, std::vector<std::size_t>& out) {
  if (n.is_leaf()) return;
  out[n.split->attribute] = std::min(out[n.split->attribute], depth);
  for (const auto& c : n.children) first_depths(c, depth + 1, out);
}

}  // namespace

TEST_CASE("bootstrap covers about 63.2% of rows") {
  double sum = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto rows = bootstrap_rows(500, t + 1);
    REQUIRE(rows.size() == 500);
    const std::set<std::size_t> distinct(rows.begin(), rows.end());
    sum += static_cast<double>(distinct.size()) / 500.0;
  }
  CHECK(sum / 1000 == doctest::Approx(0.632).epsilon(0.02 / 0.632));
  CHECK(bootstrap_rows(1, 9) == std::vector<std::size_t>{0});
  CHECK(bootstrap_rows(50, 3) == bootstrap_rows(50, 3));
  CHECK(bootstrap_rows(50, 3) != bootstrap_rows(50, 4));
  CHECK(bootstrap_sample(fixtures::weather(), 5).size() == 14);
}

TEST_CASE("random forest with the identity hook equals a lone random tree") {
  const auto ds = fixtures::weather_numeric();
  const auto f = train_random_forest(ds, {.num_trees = 3, .subspace = 2, .seed = 4, .identity_bootstrap = true});
  REQUIRE(f.members.size() == 3);
  for (std::size_t t = 0; t < 3; ++t)
    CHECK(render_tree(f.members[t]) == render_tree(train_random_tree(ds, 2, f.member_seeds[t])));
  CHECK(render_forest(f) == render_forest(train_random_forest(ds, {.num_trees = 3, .subspace = 2, .seed = 4,
                                                                   .identity_bootstrap = true})));
}

TEST_CASE("forest prediction averages member votes") {
  ForestModel f;
  f.schema = fixtures::weather().attributes();
  f.class_index = 4;
  for (auto counts : {ClassDistribution{3, 0}, ClassDistribution{2, 0}, ClassDistribution{0, 5}}) {
    TreeModel t;
    t.schema = f.schema;
    t.class_index = 4;
    t.root.distribution = counts;
    f.members.push_back(t);
  }
  const auto p = forest_predict(f, fixtures::weather().instance(0));
  CHECK(p[0] == doctest::Approx(2.0 / 3));
  CHECK(p[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("SysFor good attributes and distinct roots") {
  const auto ds = fixtures::weather();
  const ClassDistribution parent{9, 5};
  std::vector<double> ratios;
  for (std::size_t a : ds.predictor_indices()) {
    std::vector<ClassDistribution> br(ds.attribute(a).arity(), ClassDistribution(2));
    for (std::size_t r = 0; r < ds.size(); ++r) br[ds.instance(r).nominal(a)].add(ds.class_of(r));
    ratios.push_back(gain_ratio(parent, br));
  }
  const double best = *std::max_element(ratios.begin(), ratios.end());
  std::vector<std::size_t> expected;
  for (std::size_t a = 0; a < ratios.size(); ++a)
    if (ratios[a] >= 0.7 * best) expected.push_back(a);
  std::sort(expected.begin(), expected.end(), [&](auto x, auto y) { return ratios[x] > ratios[y]; });
  CHECK(sysfor_good_attributes(ds, 0.3) == expected);
  CHECK(expected == std::vector<std::size_t>{0, 2});

  const auto car = load_arff(fixtures::uci_dir() / "car.arff");
  const auto good = sysfor_good_attributes(car, 0.3);
  const auto f = train_sysfor(car, {.num_trees = 10});
  // SysFor may run out of good attributes before reaching the requested count.
  CHECK(f.members.size() <= 10);
  CHECK(f.members.size() > good.size());
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < good.size(); ++i) {
    REQUIRE(f.members[i].root.split);
    CHECK(f.members[i].root.split->attribute == good[i]);
    roots.insert(f.members[i].root.split->attribute);
  }
  CHECK(roots.size() == good.size());
  CHECK_THROWS_AS(train_sysfor(car, {.goodness_threshold = 1.5}), ValidationError);
}

TEST_CASE("ForestPA weights follow the depth penalty") {
  AttributeWeights w(4, 3);
  w.update(split_on(0, {split_on(1, {leaf({1, 0}), leaf({0, 1})}), leaf({1, 0})}));
  CHECK(w.weight(0) == doctest::Approx(1.0 / 2));
  CHECK(w.weight(1) == doctest::Approx(2.0 / 3));
  CHECK(w.weight(2) == 1.0);
  CHECK(w.cooldown(0) == 3);

  double prev = w.weight(0);
  for (int i = 0; i < 3; ++i) {
    w.update(leaf({1, 1}));
    CHECK(w.weight(0) > prev);
    prev = w.weight(0);
  }
  CHECK(w.weight(0) == 1.0);
  CHECK(w.weight(1) == 1.0);
  CHECK(w.cooldown(0) == 0);
  CHECK_THROWS_AS(AttributeWeights(3, 0), ValidationError);

  const auto car = load_arff(fixtures::uci_dir() / "car.arff");
  std::vector<AttributeWeights> after;
  const auto f = train_forest_pa(car, {.num_trees = 4, .seed = 2}, {}, &after);
  REQUIRE(after.size() == 4);
  std::vector<std::size_t> depth(car.num_attributes(), 1000);
  first_depths(f.members[0].root, 0, depth);
  for (std::size_t a = 0; a < car.num_attributes(); ++a)
    CHECK(after[0].weight(a) == doctest::Approx(depth[a] == 1000 ? 1.0 : penalty_weight(depth[a])));
}

TEST_CASE("ForestPA with one tree is the unweighted base tree") {
  const auto car = load_arff(fixtures::uci_dir() / "car.arff");
  const auto f = train_forest_pa(car, {.num_trees = 1, .seed = 5});
  const auto base = train_c45(bootstrap_sample(car, f.member_seeds[0]), {.min_leaf = 2, .prune = false});
  CHECK(render_tree(f.members[0]) == render_tree(base));
}

TEST_CASE("forests reject zero trees and honour cancellation") {
  const auto ds = fixtures::weather();
  CHECK_THROWS_AS(train_random_forest(ds, {.num_trees = 0}), ValidationError);
  std::atomic<bool> cancel{true};
  const RunControl control(&cancel, {});
  CHECK_THROWS_AS(train_random_forest(ds, {}, control), Cancelled);
  CHECK_THROWS_AS(train_forest_pa(ds, {}, control), Cancelled);
  CHECK_THROWS_AS(train_sysfor(ds, {}, control), Cancelled);
}
