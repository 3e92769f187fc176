#include "datalearner/split_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace datalearner {

void ClassDistribution::add(const ClassDistribution& other) {
  for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] += other.counts_[c];
}

void ClassDistribution::subtract(const ClassDistribution& other) {
  for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] -= other.counts_[c];
}

double ClassDistribution::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0.0); }

std::size_t ClassDistribution::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts_.size(); ++c)
    if (counts_[c] > counts_[best]) best = c;
  return best;
}

bool ClassDistribution::pure() const noexcept {
  std::size_t nonzero = 0;
  for (double w : counts_)
    if (w > 0) ++nonzero;
  return nonzero <= 1;
}

std::vector<double> ClassDistribution::normalized() const {
  const double t = total();
  std::vector<double> out(counts_.size(), counts_.empty() ? 0.0 : 1.0 / static_cast<double>(counts_.size()));
  if (t > 0)
    for (std::size_t c = 0; c < counts_.size(); ++c) out[c] = counts_[c] / t;
  return out;
}

namespace {

double plogp_sum(const std::vector<double>& w, double total) {
  double h = 0;
  for (double x : w)
    if (x > 0) {
      const double p = x / total;
      h -= p * std::log2(p);
    }
  return h;
}

}  // namespace

double entropy(const ClassDistribution& d) {
  const double t = d.total();
  if (!(t > 0)) throw std::invalid_argument("entropy of an empty distribution");
  return std::max(0.0, plogp_sum(d.counts(), t));
}

double gini(const ClassDistribution& d) {
  const double t = d.total();
  if (!(t > 0)) throw std::invalid_argument("gini of an empty distribution");
  double s = 0;
  for (double x : d.counts()) s += (x / t) * (x / t);
  return std::max(0.0, 1.0 - s);
}

double info_gain(const ClassDistribution& parent, std::span<const ClassDistribution> branches) {
  const double t = parent.total();
  if (!(t > 0)) return 0;
  double after = 0;
  for (const auto& b : branches) {
    const double bt = b.total();
    if (bt > 0) after += bt / t * entropy(b);
  }
  return std::max(0.0, entropy(parent) - after);
}

double split_info(std::span<const ClassDistribution> branches) {
  std::vector<double> sizes;
  for (const auto& b : branches) sizes.push_back(b.total());
  const double t = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  return t > 0 ? plogp_sum(sizes, t) : 0.0;
}

double gain_ratio(const ClassDistribution& parent, std::span<const ClassDistribution> branches) {
  const double si = split_info(branches);
  if (si <= 1e-12) return 0;
  return info_gain(parent, branches) / si;
}

double gini_gain(const ClassDistribution& parent, std::span<const ClassDistribution> branches) {
  const double t = parent.total();
  if (!(t > 0)) return 0;
  double after = 0;
  for (const auto& b : branches) {
    const double bt = b.total();
    if (bt > 0) after += bt / t * gini(b);
  }
  return std::max(0.0, gini(parent) - after);
}

double split_score(SplitCriterion criterion, const ClassDistribution& parent,
                   std::span<const ClassDistribution> branches) {
  switch (criterion) {
    case SplitCriterion::info_gain: return info_gain(parent, branches);
    case SplitCriterion::gain_ratio: return gain_ratio(parent, branches);
    case SplitCriterion::gini: return gini_gain(parent, branches);
  }
  return 0;
}

namespace {

/// Sorted values with per-distinct-value class weights.
struct Runs {
  std::vector<double> distinct;
  std::vector<ClassDistribution> weights;  // one per distinct value
  ClassDistribution total;
};

Runs build_runs(std::span<const LabeledValue> values, std::size_t num_classes) {
  std::vector<LabeledValue> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledValue& a, const LabeledValue& b) { return a.value < b.value; });
  Runs r;
  r.total = ClassDistribution(num_classes);
  for (const auto& v : sorted) {
    if (r.distinct.empty() || v.value != r.distinct.back()) {
      r.distinct.push_back(v.value);
      r.weights.emplace_back(num_classes);
    }
    r.weights.back().add(v.label, v.weight);
    r.total.add(v.label, v.weight);
  }
  return r;
}

double weighted_impurity(SplitCriterion criterion, const ClassDistribution& d, double parent_total) {
  const double t = d.total();
  if (!(t > 0)) return 0;
  return t / parent_total * (criterion == SplitCriterion::gini ? gini(d) : entropy(d));
}

/// Two-branch score without materialising a branch list.
double binary_score(SplitCriterion criterion, const ClassDistribution& parent, double parent_impurity,
                    const ClassDistribution& left, const ClassDistribution& right) {
  const double t = parent.total();
  const double gain = std::max(0.0, parent_impurity - weighted_impurity(criterion, left, t) -
                                        weighted_impurity(criterion, right, t));
  if (criterion != SplitCriterion::gain_ratio) return gain;
  const double pl = left.total() / t;
  const double pr = right.total() / t;
  double si = 0;
  if (pl > 0) si -= pl * std::log2(pl);
  if (pr > 0) si -= pr * std::log2(pr);
  return si <= 1e-12 ? 0.0 : gain / si;
}

/// Scores the boundaries listed in `boundaries` (boundary b splits distinct[b] | distinct[b+1]),
/// which must be ascending.
std::optional<NumericSplit> scan(const Runs& r, const std::vector<std::size_t>& boundaries,
                                 const NumericSplitOptions& opt) {
  std::optional<NumericSplit> best;
  ClassDistribution left(r.total.size());
  ClassDistribution right = r.total;
  std::size_t next_run = 0;
  std::size_t evaluated = 0;
  std::size_t candidates = 0;
  const double total = r.total.total();
  const double parent_impurity = opt.criterion == SplitCriterion::gini ? gini(r.total) : entropy(r.total);
  for (std::size_t b : boundaries) {
    while (next_run <= b) {
      left.add(r.weights[next_run]);
      right.subtract(r.weights[next_run]);
      ++next_run;
    }
    ++evaluated;
    const double lw = left.total();
    const double rw = total - lw;
    if (lw < opt.min_branch_weight || rw < opt.min_branch_weight || lw <= 0 || rw <= 0) continue;
    ++candidates;
    const double score = binary_score(opt.criterion, r.total, parent_impurity, left, right);
    if (!best || score > best->score) {
      if (!best) best.emplace();
      best->threshold = (r.distinct[b] + r.distinct[b + 1]) / 2.0;
      best->left = left;
      best->right = right;
      best->score = score;
    }
  }
  if (best) {
    best->evaluated = evaluated;
    best->candidates = candidates;
  }
  return best;
}

}  // namespace

std::optional<NumericSplit> best_numeric_split(std::span<const LabeledValue> values, std::size_t num_classes,
                                               const NumericSplitOptions& options) {
  Runs r = build_runs(values, num_classes);
  if (r.distinct.size() < 2) return std::nullopt;
  std::vector<std::size_t> boundaries(r.distinct.size() - 1);
  std::iota(boundaries.begin(), boundaries.end(), std::size_t{0});
  return scan(r, boundaries, options);
}

std::optional<NumericSplit> sampled_numeric_split(std::span<const LabeledValue> values, std::size_t num_classes,
                                                  std::size_t max_points, const NumericSplitOptions& options) {
  if (max_points < 2) throw std::invalid_argument("max_points must be at least 2");
  Runs r = build_runs(values, num_classes);
  if (r.distinct.size() < 2) return std::nullopt;
  const std::size_t midpoints = r.distinct.size() - 1;
  std::vector<std::size_t> boundaries;
  if (midpoints <= max_points) {
    boundaries.resize(midpoints);
    std::iota(boundaries.begin(), boundaries.end(), std::size_t{0});
  } else {
    // Centre of each of max_points equal rank bands; the step is >= 1 so indices are distinct.
    const double step = static_cast<double>(midpoints) / static_cast<double>(max_points);
    for (std::size_t j = 0; j < max_points; ++j)
      boundaries.push_back(static_cast<std::size_t>((static_cast<double>(j) + 0.5) * step));
  }
  return scan(r, boundaries, options);
}

}  // namespace datalearner
