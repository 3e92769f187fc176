#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"
#include "datalearner/tree.hpp"

namespace datalearner {

struct ForestModel {
  std::string algorithm;
  std::vector<Attribute> schema;
  std::size_t class_index = 0;
  std::vector<TreeModel> members;
  std::vector<std::uint64_t> member_seeds;
};

/// ForestPA's per-attribute penalty state.
class AttributeWeights {
public:
  AttributeWeights() = default;
  AttributeWeights(std::size_t num_attributes, std::size_t recovery_trees);

  const std::vector<double>& weights() const noexcept { return weight_; }
  double weight(std::size_t a) const { return weight_.at(a); }
  std::size_t cooldown(std::size_t a) const { return cooldown_.at(a); }

  /// Applies one tree: penalised attributes it does not test recover one step,
  /// then every attribute it tests is penalised by the depth it first appears at.
  void update(const TreeNode& root);

private:
  std::size_t eta_ = 1;
  std::vector<double> weight_;
  std::vector<double> penalised_to_;
  std::vector<std::size_t> cooldown_;
};

/// Weight an attribute receives when first tested at depth d (root = 0).
inline double penalty_weight(std::size_t depth) {
  return static_cast<double>(depth + 1) / static_cast<double>(depth + 2);
}

/// N draws with replacement.
std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed);
Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed);

struct RandomForestOptions {
  std::size_t num_trees = 10;
  std::size_t subspace = 0;  // 0 = ceil(sqrt(number of predictors))
  std::uint64_t seed = 1;
  bool identity_bootstrap = false;  // test hook: every member sees the full data
};

struct SysForOptions {
  std::size_t num_trees = 10;
  double goodness_threshold = 0.3;
  double confidence = 0.25;
  double min_leaf = 2;
  std::uint64_t seed = 1;
};

struct ForestPAOptions {
  std::size_t num_trees = 10;
  std::size_t recovery_trees = 3;
  double min_leaf = 2;
  std::uint64_t seed = 1;
};

/// Unpruned information-gain tree evaluating a random attribute subspace per node.
TreeModel train_random_tree(const Dataset& ds, std::size_t subspace, std::uint64_t seed);

ForestModel train_random_forest(const Dataset& ds, const RandomForestOptions& options = {},
                                const RunControl& control = {});

/// Predictors whose root gain ratio is at least (1 - threshold) of the best, best first.
std::vector<std::size_t> sysfor_good_attributes(const Dataset& ds, double goodness_threshold);

ForestModel train_sysfor(const Dataset& ds, const SysForOptions& options = {}, const RunControl& control = {});

/// `weights_after`, when given, receives the weight state after each member tree.
ForestModel train_forest_pa(const Dataset& ds, const ForestPAOptions& options = {}, const RunControl& control = {},
                            std::vector<AttributeWeights>* weights_after = nullptr);

/// Average of the members' normalized distributions.
std::vector<double> forest_predict(const ForestModel& model, const Instance& inst);

std::string render_forest(const ForestModel& model);

}  // namespace datalearner
