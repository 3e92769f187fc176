#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "datalearner/tree.hpp"

using namespace datalearner;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

double training_accuracy(const TreeModel& m, const Dataset& ds) {
  double ok = 0;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto p = tree_predict(m, ds.instance(r));
    ok += static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()) == ds.class_of(r);
  }
  return ok / static_cast<double>(ds.size());
}

void check_leaf_sums(const TreeNode& n, bool exact) {
  if (n.is_leaf()) return;
  ClassDistribution sum(n.distribution.size());
  for (const auto& c : n.children) {
    sum.add(c.distribution);
    check_leaf_sums(c, exact);
  }
  for (std::size_t c = 0; c < sum.size(); ++c) {
    if (exact)
      CHECK(sum[c] == doctest::Approx(n.distribution[c]));
    else
      CHECK(sum[c] <= n.distribution[c] + 1e-9);
  }
}

/// Random all-nominal classification data with no missing cells.
Dataset random_nominal(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Attribute> attrs;
  const std::size_t na = 2 + rng.uniform_index(4);
  for (std::size_t a = 0; a <= na; ++a) {
    Attribute at{"a" + std::to_string(a), AttributeKind::nominal, {}, a};
    const std::size_t nv = 2 + rng.uniform_index(3);
    for (std::size_t v = 0; v < nv; ++v) at.values.push_back("v" + std::to_string(v));
    attrs.push_back(at);
  }
  Dataset ds("r", attrs);
  ds.set_class_index_unchecked(na);
  const std::size_t rows = 30 + rng.uniform_index(120);
  for (std::size_t r = 0; r < rows; ++r) {
    Instance inst;
    for (const auto& at : attrs) inst.values.push_back(static_cast<double>(rng.uniform_index(at.arity())));
    // Class loosely follows the first attribute.
    if (rng.uniform_index(3) != 0) inst.values[na] = static_cast<double>(inst.nominal(0) % attrs[na].arity());
    ds.add(inst);
  }
  return ds;
}

}  // namespace

TEST_CASE("pure data gives a single leaf") {
  const auto ds = fixtures::weather().subset({2, 3, 4, 6});
  for (const auto& m : {train_c45(ds), train_rep_tree(ds), train_cart_spaarc(ds)}) {
    CHECK(m.node_count() == 1);
    CHECK(m.root.predicted() == 0);
    CHECK(count_lines(render_tree(m)) == 1);
  }
}

TEST_CASE("C4.5 root on weather follows the average-gain gate") {
  const auto ds = fixtures::weather();
  // Oracle: among attributes with at least average gain, highest gain ratio.
  const ClassDistribution parent{9, 5};
  std::vector<double> gains, ratios;
  for (std::size_t a : ds.predictor_indices()) {
    std::vector<ClassDistribution> br(ds.attribute(a).arity(), ClassDistribution(2));
    for (std::size_t r = 0; r < ds.size(); ++r) br[ds.instance(r).nominal(a)].add(ds.class_of(r));
    gains.push_back(info_gain(parent, br));
    ratios.push_back(gain_ratio(parent, br));
  }
  const double avg = std::accumulate(gains.begin(), gains.end(), 0.0) / static_cast<double>(gains.size());
  std::size_t best = 0;
  double best_ratio = -1;
  for (std::size_t a = 0; a < gains.size(); ++a)
    if (gains[a] >= avg - 1e-9 && ratios[a] > best_ratio) {
      best_ratio = ratios[a];
      best = a;
    }
  const auto m = train_c45(ds);
  REQUIRE(m.root.split);
  CHECK(m.root.split->attribute == best);
  CHECK(best == 0);
  CHECK(render_tree(m).rfind("root: split outlook", 0) == 0);
}

TEST_CASE("children partition their parent") {
  const auto ds = fixtures::weather_numeric();
  check_leaf_sums(train_c45(ds, {.prune = false}).root, true);
  check_leaf_sums(train_cart_spaarc(ds).root, true);
  check_leaf_sums(train_rep_tree(ds, {.prune = false}).root, true);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto r = random_nominal(s);
    check_leaf_sums(train_c45(r).root, true);
    check_leaf_sums(train_cart_spaarc(r, {.split_sampling = true, .attr_sampling = true}).root, true);
  }
}

TEST_CASE("pruning trades training accuracy for size") {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto ds = random_nominal(s);
    const auto full = train_c45(ds, {.prune = false});
    const auto pruned = train_c45(ds);
    CHECK(training_accuracy(full, ds) >= training_accuracy(pruned, ds) - 1e-12);
    CHECK(pruned.node_count() <= full.node_count());

    const auto rf = train_rep_tree(ds, {.seed = s, .prune = false});
    const auto rp = train_rep_tree(ds, {.seed = s});
    CHECK(rp.node_count() <= rf.node_count());
  }
}

TEST_CASE("SPAARC with both flags off is CART") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto ds = fixtures::random_dataset(s);
    if (ds.empty() || !ds.class_attribute().is_nominal()) continue;
    bool has_string = false;
    for (const auto& a : ds.attributes()) has_string = has_string || a.is_string();
    if (has_string) continue;
    auto cart = train_cart_spaarc(ds);
    auto spaarc = train_cart_spaarc(ds, {.split_sampling = false, .attr_sampling = false, .seed = 99});
    cart.algorithm = spaarc.algorithm;
    CHECK(render_tree(cart) == render_tree(spaarc));
  }
  const auto w = fixtures::weather_numeric();
  CHECK(render_tree(train_cart_spaarc(w)) == render_tree(train_cart_spaarc(w, {.seed = 7})));
}

TEST_CASE("rendering is one line per node and deterministic") {
  const auto ds = fixtures::weather_numeric();
  for (const auto& m : {train_c45(ds, {.min_leaf = 1, .prune = false}), train_rep_tree(ds, {.min_leaf = 1, .prune = false}),
                        train_cart_spaarc(ds, {.min_leaf = 1})}) {
    CHECK(count_lines(render_tree(m)) == m.node_count());
    CHECK(m.leaf_count() <= m.node_count());
  }
  CHECK(render_tree(train_c45(ds)) == render_tree(train_c45(ds)));
  CHECK(render_tree(train_rep_tree(ds)) == render_tree(train_rep_tree(ds)));
}

TEST_CASE("missing values at prediction time") {
  TreeModel m;
  m.schema = fixtures::weather().attributes();
  m.class_index = 4;
  m.root.distribution = ClassDistribution{20, 20};
  NodeSplit split;
  split.attribute = 2;
  split.form = SplitForm::nominal_multiway;
  split.branch_weights = {10, 30};
  m.root.split = split;
  TreeNode yes, no;
  yes.distribution = ClassDistribution{10, 0};
  no.distribution = ClassDistribution{10, 20};
  m.root.children = {yes, no};

  const Instance inst{{0, 0, kMissing, 0, kMissing}};
  m.missing = MissingRouting::largest_branch;
  auto p = tree_predict(m, inst);
  CHECK(p[0] == doctest::Approx(1.0 / 3));
  m.missing = MissingRouting::fractional;
  p = tree_predict(m, inst);
  CHECK(p[0] == doctest::Approx(0.25 * 1.0 + 0.75 * (1.0 / 3)));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));

  // Known value goes down its own branch.
  const Instance high{{0, 0, 0, 0, kMissing}};
  CHECK(tree_predict(m, high)[0] == doctest::Approx(1.0));
}

TEST_CASE("trees refuse mismatched instances") {
  const auto m = train_c45(fixtures::weather());
  CHECK_THROWS_AS(tree_predict(m, Instance{{0, 0}}), ValidationError);
  CHECK_THROWS_AS(tree_predict(m, Instance{{7, 0, 0, 0, 0}}), ValidationError);
}

TEST_CASE("REPTree validates its fold count") {
  const auto ds = fixtures::weather();
  CHECK_THROWS_AS(train_rep_tree(ds, {.prune_folds = 1}), ValidationError);
  CHECK_THROWS_AS(train_rep_tree(ds.subset({0, 1}), {.prune_folds = 3}), ValidationError);
}

TEST_CASE("C4.5 separates complete mushroom data") {
  const auto ds = load_arff(fixtures::test_data_dir() / "mushroom-complete.arff");
  const auto m = train_c45(ds);
  CHECK(training_accuracy(m, ds) == 1.0);
}
