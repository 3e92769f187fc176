#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace datalearner {

/// Per-class weights. Fractional weights arise from C4.5's missing-value handling.
class ClassDistribution {
public:
  ClassDistribution() = default;
  explicit ClassDistribution(std::size_t num_classes) : counts_(num_classes, 0.0) {}
  ClassDistribution(std::initializer_list<double> counts) : counts_(counts) {}
  explicit ClassDistribution(std::vector<double> counts) : counts_(std::move(counts)) {}

  std::size_t size() const noexcept { return counts_.size(); }
  double operator[](std::size_t c) const { return counts_[c]; }
  double& operator[](std::size_t c) { return counts_[c]; }
  const std::vector<double>& counts() const noexcept { return counts_; }

  void add(std::size_t c, double w = 1.0) { counts_[c] += w; }
  void add(const ClassDistribution& other);
  void subtract(const ClassDistribution& other);

  double total() const noexcept;
  /// Highest-weight class; ties go to the lowest class index.
  std::size_t argmax() const noexcept;
  /// Non-majority weight.
  double errors() const noexcept { return total() - (counts_.empty() ? 0.0 : counts_[argmax()]); }
  bool pure() const noexcept;
  /// Counts divided by the total; uniform when the total is zero.
  std::vector<double> normalized() const;

  bool operator==(const ClassDistribution&) const = default;

private:
  std::vector<double> counts_;
};

/// Shannon entropy in bits. Throws std::invalid_argument on zero total weight.
double entropy(const ClassDistribution& d);

/// Gini impurity 1 - sum p^2. Throws std::invalid_argument on zero total weight.
double gini(const ClassDistribution& d);

/// Weighted information gain of partitioning `parent` into `branches`.
double info_gain(const ClassDistribution& parent, std::span<const ClassDistribution> branches);

/// Entropy of the branch-size proportions.
double split_info(std::span<const ClassDistribution> branches);

/// info_gain / split_info, or 0 when fewer than two branches carry weight.
double gain_ratio(const ClassDistribution& parent, std::span<const ClassDistribution> branches);

/// Reduction in weighted Gini impurity.
double gini_gain(const ClassDistribution& parent, std::span<const ClassDistribution> branches);

enum class SplitCriterion { info_gain, gain_ratio, gini };

double split_score(SplitCriterion criterion, const ClassDistribution& parent,
                   std::span<const ClassDistribution> branches);

struct LabeledValue {
  double value;
  std::size_t label;
  double weight = 1.0;
};

/// Binary split `value <= threshold` on one numeric attribute.
struct NumericSplit {
  double threshold = 0;
  ClassDistribution left;
  ClassDistribution right;
  double score = 0;
  /// Number of thresholds whose score was computed.
  std::size_t evaluated = 0;
  /// Thresholds that passed the minimum-branch-weight constraint.
  std::size_t candidates = 0;
};

struct NumericSplitOptions {
  SplitCriterion criterion = SplitCriterion::info_gain;
  /// Minimum weight on each side for a threshold to count.
  double min_branch_weight = 0;
};

/// Scores every midpoint between adjacent distinct values and returns the best
/// (ties to the lower threshold). Missing values must already be removed.
/// Returns nullopt when fewer than two distinct values exist or no threshold
/// satisfies the branch-weight constraint.
std::optional<NumericSplit> best_numeric_split(std::span<const LabeledValue> values, std::size_t num_classes,
                                               const NumericSplitOptions& options = {});

/// As best_numeric_split but scores at most `max_points` midpoints, spaced evenly by
/// rank across the sorted distinct values. Identical to the baseline when the
/// number of midpoints does not exceed `max_points`.
std::optional<NumericSplit> sampled_numeric_split(std::span<const LabeledValue> values, std::size_t num_classes,
                                                  std::size_t max_points, const NumericSplitOptions& options = {});

}  // namespace datalearner
