#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"

namespace datalearner {

/// attribute = value. Items order by (attribute, value).
struct Item {
  std::size_t attribute = 0;
  std::size_t value = 0;

  auto operator<=>(const Item&) const = default;
};

struct FrequentItemset {
  std::vector<Item> items;  // ascending
  std::size_t count = 0;

  bool operator==(const FrequentItemset&) const = default;
};

struct ItemsetRule {
  std::vector<Item> antecedent;
  std::vector<Item> consequent;
  std::size_t union_count = 0;
  std::size_t antecedent_count = 0;
  double support = 0;
  double confidence = 0;

  bool operator==(const ItemsetRule&) const = default;
};

struct AprioriOptions {
  double min_support = 0.1;
  double min_confidence = 0.9;
  std::size_t max_rules = 10;  // 0 keeps every rule
};

struct AprioriResult {
  std::size_t transactions = 0;
  /// Every frequent itemset, by size then lexicographically.
  std::vector<FrequentItemset> itemsets;
  std::vector<ItemsetRule> rules;
};

/// Minimum count for an itemset to be frequent: ceil(min_support * transactions).
std::size_t min_support_count(double min_support, std::size_t transactions);

/// Strict ranking used for rule output: confidence, then support, then the item lists.
bool rule_before(const ItemsetRule& a, const ItemsetRule& b);

AprioriResult mine_apriori(const Dataset& ds, const AprioriOptions& options = {}, const RunControl& control = {});

std::string render_rules(const Dataset& ds, const AprioriResult& result);

}  // namespace datalearner
