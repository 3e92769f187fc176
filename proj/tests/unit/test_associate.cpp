#include <algorithm>
#include <map>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "datalearner/associate.hpp"

using namespace datalearner;
using oracles::brute_force;
using oracles::random_baskets;

TEST_CASE("min support count rounds up") {
  CHECK(min_support_count(0.1, 14) == 2);
  CHECK(min_support_count(0.5, 14) == 7);
  CHECK(min_support_count(0.3, 10) == 3);  // 0.3 * 10 is 3.0000000000000004
  CHECK(min_support_count(0.01, 10) == 1);
  CHECK(min_support_count(1.0, 7) == 7);
}

TEST_CASE("Apriori matches brute force on random fixtures") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto ds = random_baskets(seed, 12, 40);
    Rng rng(seed * 31);
    const double sup = 0.05 + 0.4 * rng.uniform01(), conf = 0.3 + 0.7 * rng.uniform01();
    const auto got = mine_apriori(ds, {sup, conf, 0});
    const auto want = brute_force(ds, sup, conf);
    CAPTURE(seed);
    CHECK(got.transactions == ds.size());
    CHECK(got.itemsets == want.itemsets);
    REQUIRE(got.rules.size() == want.rules.size());
    for (std::size_t i = 0; i < want.rules.size(); ++i) {
      CHECK(got.rules[i].antecedent == want.rules[i].antecedent);
      CHECK(got.rules[i].consequent == want.rules[i].consequent);
      CHECK(got.rules[i].union_count == want.rules[i].union_count);
      CHECK(got.rules[i].antecedent_count == want.rules[i].antecedent_count);
    }
    const auto capped = mine_apriori(ds, {sup, conf, 3});
    CHECK(capped.rules.size() == std::min<std::size_t>(3, want.rules.size()));
  }
}

TEST_CASE("Apriori on weather") {
  const auto ds = fixtures::weather();
  const auto r = mine_apriori(ds, {0.1, 0.9, 10});
  REQUIRE(r.rules.size() == 10);
  for (std::size_t i = 1; i < r.rules.size(); ++i) CHECK_FALSE(rule_before(r.rules[i], r.rules[i - 1]));
  // outlook=overcast -> play=yes holds in all 4 overcast rows.
  const ItemsetRule* overcast = nullptr;
  for (const auto& rule : mine_apriori(ds, {0.15, 0.9, 0}).rules)
    if (rule.antecedent == std::vector<Item>{{0, 1}} && rule.consequent == std::vector<Item>{{4, 0}}) overcast = &rule;
  CHECK(overcast != nullptr);
  CHECK(render_rules(ds, r).find("==>") != std::string::npos);
}

TEST_CASE("Apriori edge cases") {
  const auto ds = fixtures::weather();
  const auto none = mine_apriori(ds, {1.0, 0.9, 0});
  CHECK(none.itemsets.empty());
  CHECK(none.rules.empty());
  CHECK_THROWS_AS(mine_apriori(ds, {0.0, 0.9, 0}), ValidationError);
  CHECK_THROWS_AS(mine_apriori(ds, {0.1, 1.5, 0}), ValidationError);
  CHECK_THROWS_AS(mine_apriori(fixtures::weather_numeric(), {}), ValidationError);
}
