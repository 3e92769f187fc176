#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"
#include "datalearner/split_math.hpp"

namespace datalearner {

enum class SplitForm {
  nominal_multiway,  // one branch per declared value
  numeric_threshold,  // branch 0: value <= threshold, branch 1: value > threshold
  nominal_one_vs_rest,  // branch 0: value == `value`, branch 1: any other value
};

struct NodeSplit {
  std::size_t attribute = 0;
  SplitForm form = SplitForm::nominal_multiway;
  double threshold = 0;
  std::size_t value = 0;
  /// Training weight of instances with a known value, per branch.
  std::vector<double> branch_weights;

  std::size_t branch_count() const noexcept { return branch_weights.size(); }
  /// Branch for a known value; nullopt when the cell is missing.
  std::optional<std::size_t> branch_of(const Instance& inst) const;
  std::size_t largest_branch() const noexcept;
};

struct TreeNode {
  ClassDistribution distribution;
  std::optional<NodeSplit> split;
  std::vector<TreeNode> children;

  bool is_leaf() const noexcept { return !split.has_value(); }
  std::size_t predicted() const noexcept { return distribution.argmax(); }
};

/// How prediction handles a missing value at a split.
enum class MissingRouting {
  fractional,  // C4.5: blend every branch weighted by its training size
  largest_branch,
};

struct TreeModel {
  std::string algorithm;
  std::vector<Attribute> schema;
  std::size_t class_index = 0;
  MissingRouting missing = MissingRouting::largest_branch;
  TreeNode root;

  std::size_t node_count() const;
  std::size_t leaf_count() const;
  /// Depth of the deepest leaf; a single leaf has depth 0.
  std::size_t depth() const;
};

struct C45Options {
  double confidence = 0.25;
  double min_leaf = 2;
  bool prune = true;
};

struct RepTreeOptions {
  std::size_t prune_folds = 3;
  double min_leaf = 2;
  std::uint64_t seed = 1;
  bool prune = true;
};

struct SpaarcOptions {
  bool split_sampling = false;
  std::size_t max_points = 20;
  bool attr_sampling = false;
  double min_leaf = 2;
  std::uint64_t seed = 1;
};

TreeModel train_c45(const Dataset& ds, const C45Options& options = {});
TreeModel train_rep_tree(const Dataset& ds, const RepTreeOptions& options = {});
/// Binary Gini tree; with both sampling flags off this is plain CART.
TreeModel train_cart_spaarc(const Dataset& ds, const SpaarcOptions& options = {});

/// Normalized class distribution for an instance.
std::vector<double> tree_predict(const TreeModel& model, const Instance& inst);

/// Deterministic indented rendering, one line per node.
std::string render_tree(const TreeModel& model);

/// Checks an instance against a training schema. Throws ValidationError.
void check_schema(const std::vector<Attribute>& schema, const Instance& inst);

}  // namespace datalearner
