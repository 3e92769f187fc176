#pragma once

// Shared induction machinery for the single-tree and forest learners.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "datalearner/dataset.hpp"
#include "datalearner/split_math.hpp"
#include "datalearner/tree.hpp"

namespace datalearner::detail {

struct WeightedRow {
  std::uint32_t row;
  double weight;
};
using Rows = std::vector<WeightedRow>;

/// Rows of `ds` with a known class, weight 1.
Rows class_known_rows(const Dataset& ds);

struct Candidate {
  NodeSplit split;
  /// Gain after known-fraction scaling (and the C4.5 threshold penalty).
  double gain = 0;
  /// Gain ratio; only meaningful for the C4.5 configuration.
  double ratio = 0;
  /// What the criterion ranks by: ratio for C4.5, gain otherwise.
  double score = 0;
};

struct GrowerConfig {
  SplitCriterion criterion = SplitCriterion::info_gain;
  /// C4.5 conventions: average-gain gate, threshold-count penalty, minimum split
  /// size for thresholds, and the unknown fraction counted in split info.
  bool c45 = false;
  /// Nominal attributes split one-vs-rest instead of one branch per value.
  bool binary_nominal = false;
  double min_leaf = 2;
  MissingRouting missing = MissingRouting::largest_branch;
  /// Caps thresholds scored per numeric attribute; 0 scores all of them.
  std::size_t max_points = 0;
  /// Per-attribute multipliers applied to candidate scores (ForestPA).
  const std::vector<double>* merit_weights = nullptr;
};

/// Which attributes a node evaluates. The first `window` entries of `order` are
/// scored; if none yields a usable split, the rest are tried one at a time.
struct Selection {
  std::vector<std::size_t> order;
  std::size_t window = 0;
};

struct NodeContext {
  std::size_t depth = 0;
  /// Scores of every attribute evaluated at the parent (-inf when not evaluated).
  const std::vector<double>* parent_scores = nullptr;
};

using Selector = std::function<Selection(const NodeContext&)>;

class Grower {
public:
  Grower(const Dataset& ds, GrowerConfig config);

  const Dataset& data() const noexcept { return ds_; }
  const GrowerConfig& config() const noexcept { return cfg_; }

  ClassDistribution distribution(const Rows& rows) const;

  /// Best split on one attribute, or nullopt when none is usable.
  std::optional<Candidate> evaluate(const Rows& rows, const ClassDistribution& dist, std::size_t attribute) const;

  /// Picks among usable candidates (C4.5 gate when configured, merit weights applied).
  /// Candidates must be in ascending attribute order; ties go to the earliest.
  std::optional<Candidate> choose(const std::vector<Candidate>& candidates) const;

  /// Splits rows per branch; missing values follow the configured routing.
  std::vector<Rows> partition(const Rows& rows, const NodeSplit& split) const;

  /// Grows a subtree. `forced_root`, when set, is the only attribute the top node may use.
  TreeNode grow(const Rows& rows, const Selector& selector, std::optional<std::size_t> forced_root = std::nullopt,
                std::size_t depth = 0, const std::vector<double>* parent_scores = nullptr) const;

  /// Selector evaluating every predictor at every node.
  Selector all_attributes() const;

  bool splittable(const ClassDistribution& dist) const;

private:
  std::optional<Candidate> evaluate_multiway(const Rows& rows, const ClassDistribution& dist, std::size_t a) const;
  std::optional<Candidate> evaluate_one_vs_rest(const Rows& rows, const ClassDistribution& dist,
                                                std::size_t a) const;
  std::optional<Candidate> evaluate_numeric(const Rows& rows, const ClassDistribution& dist, std::size_t a) const;

  const Dataset& ds_;
  GrowerConfig cfg_;
  std::size_t num_classes_;
  std::vector<std::size_t> predictors_;
};

/// Upper confidence bound on extra errors at a leaf holding `n` weight with `e` errors.
double pessimistic_extra_errors(double n, double e, double confidence);

/// C4.5 post-processing: collapse useless subtrees, then pessimistic subtree
/// replacement. Nodes at depth < `protected_depth` are never turned into leaves.
void c45_prune(TreeNode& node, double confidence, std::size_t protected_depth = 0);

/// Attribute tested nearest the root, per attribute index (nullopt if unused).
std::vector<std::optional<std::size_t>> min_split_depths(const TreeNode& root, std::size_t num_attributes);

}  // namespace datalearner::detail
