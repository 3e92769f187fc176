#include "tree_grower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace datalearner::detail {

namespace {

constexpr double kNoScore = -std::numeric_limits<double>::infinity();
constexpr double kMinGain = 1e-12;

double impurity(SplitCriterion c, const ClassDistribution& d) {
  return c == SplitCriterion::gini ? gini(d) : entropy(d);
}

/// Gain of a known-value partition using the criterion's impurity.
double partition_gain(SplitCriterion c, const ClassDistribution& known, const std::vector<ClassDistribution>& parts) {
  const double t = known.total();
  if (!(t > 0)) return 0;
  double after = 0;
  for (const auto& p : parts) {
    const double pt = p.total();
    if (pt > 0) after += pt / t * impurity(c, p);
  }
  return std::max(0.0, impurity(c, known) - after);
}

double split_info_with_unknown(const std::vector<double>& branch_weights, double unknown) {
  std::vector<ClassDistribution> sizes;
  for (double w : branch_weights) sizes.push_back(ClassDistribution{w});
  if (unknown > 0) sizes.push_back(ClassDistribution{unknown});
  return split_info(sizes);
}

}  // namespace

Rows class_known_rows(const Dataset& ds) {
  Rows rows;
  rows.reserve(ds.size());
  const std::size_t ci = ds.class_index();
  for (std::size_t r = 0; r < ds.size(); ++r)
    if (!ds.instance(r).missing(ci)) rows.push_back({static_cast<std::uint32_t>(r), 1.0});
  return rows;
}

Grower::Grower(const Dataset& ds, GrowerConfig config)
    : ds_(ds), cfg_(config), num_classes_(ds.num_classes()), predictors_(ds.predictor_indices()) {}

ClassDistribution Grower::distribution(const Rows& rows) const {
  ClassDistribution d(num_classes_);
  const std::size_t ci = ds_.class_index();
  for (const auto& r : rows) d.add(ds_.instance(r.row).nominal(ci), r.weight);
  return d;
}

bool Grower::splittable(const ClassDistribution& dist) const {
  const double total = dist.total();
  return total > 0 && total >= 2 * cfg_.min_leaf && !dist.pure();
}

std::optional<Candidate> Grower::evaluate(const Rows& rows, const ClassDistribution& dist,
                                          std::size_t attribute) const {
  const Attribute& a = ds_.attribute(attribute);
  if (a.is_numeric()) return evaluate_numeric(rows, dist, attribute);
  if (a.is_nominal())
    return cfg_.binary_nominal ? evaluate_one_vs_rest(rows, dist, attribute) : evaluate_multiway(rows, dist, attribute);
  return std::nullopt;
}

std::optional<Candidate> Grower::evaluate_multiway(const Rows& rows, const ClassDistribution& dist,
                                                   std::size_t a) const {
  const Attribute& attr = ds_.attribute(a);
  const std::size_t ci = ds_.class_index();
  std::vector<ClassDistribution> parts(attr.arity(), ClassDistribution(num_classes_));
  ClassDistribution known(num_classes_);
  for (const auto& r : rows) {
    const Instance& inst = ds_.instance(r.row);
    if (inst.missing(a)) continue;
    parts[inst.nominal(a)].add(inst.nominal(ci), r.weight);
    known.add(inst.nominal(ci), r.weight);
  }
  const double known_w = known.total();
  if (!(known_w > 0)) return std::nullopt;
  std::size_t big = 0;
  for (const auto& p : parts)
    if (p.total() >= cfg_.min_leaf && p.total() > 0) ++big;
  if (big < 2) return std::nullopt;

  Candidate c;
  c.split.attribute = a;
  c.split.form = SplitForm::nominal_multiway;
  for (const auto& p : parts) c.split.branch_weights.push_back(p.total());
  const double total = dist.total();
  c.gain = partition_gain(cfg_.criterion == SplitCriterion::gini ? SplitCriterion::gini : SplitCriterion::info_gain,
                          known, parts) *
           (known_w / total);
  if (cfg_.criterion == SplitCriterion::gain_ratio) {
    const double si = cfg_.c45 ? split_info_with_unknown(c.split.branch_weights, total - known_w)
                               : split_info_with_unknown(c.split.branch_weights, 0);
    c.ratio = si > 1e-12 ? c.gain / si : 0;
    c.score = c.ratio;
  } else {
    c.score = c.gain;
  }
  if (c.gain <= kMinGain) return std::nullopt;
  return c;
}

std::optional<Candidate> Grower::evaluate_one_vs_rest(const Rows& rows, const ClassDistribution& dist,
                                                      std::size_t a) const {
  const Attribute& attr = ds_.attribute(a);
  const std::size_t ci = ds_.class_index();
  std::vector<ClassDistribution> parts(attr.arity(), ClassDistribution(num_classes_));
  ClassDistribution known(num_classes_);
  for (const auto& r : rows) {
    const Instance& inst = ds_.instance(r.row);
    if (inst.missing(a)) continue;
    parts[inst.nominal(a)].add(inst.nominal(ci), r.weight);
    known.add(inst.nominal(ci), r.weight);
  }
  const double known_w = known.total();
  if (!(known_w > 0)) return std::nullopt;
  const SplitCriterion crit =
      cfg_.criterion == SplitCriterion::gini ? SplitCriterion::gini : SplitCriterion::info_gain;

  std::optional<Candidate> best;
  for (std::size_t v = 0; v < attr.arity(); ++v) {
    const double lw = parts[v].total();
    const double rw = known_w - lw;
    if (lw <= 0 || rw <= 0 || lw < cfg_.min_leaf || rw < cfg_.min_leaf) continue;
    ClassDistribution rest = known;
    rest.subtract(parts[v]);
    std::vector<ClassDistribution> two{parts[v], rest};
    const double gain = partition_gain(crit, known, two) * (known_w / dist.total());
    double ratio = 0;
    if (cfg_.criterion == SplitCriterion::gain_ratio) {
      const double si = split_info_with_unknown({lw, rw}, cfg_.c45 ? dist.total() - known_w : 0);
      ratio = si > 1e-12 ? gain / si : 0;
    }
    const double score = cfg_.criterion == SplitCriterion::gain_ratio ? ratio : gain;
    if (gain <= kMinGain) continue;
    if (!best || score > best->score) {
      Candidate c;
      c.split.attribute = a;
      c.split.form = SplitForm::nominal_one_vs_rest;
      c.split.value = v;
      c.split.branch_weights = {lw, rw};
      c.gain = gain;
      c.ratio = ratio;
      c.score = score;
      best = std::move(c);
    }
  }
  return best;
}

std::optional<Candidate> Grower::evaluate_numeric(const Rows& rows, const ClassDistribution& dist,
                                                  std::size_t a) const {
  const std::size_t ci = ds_.class_index();
  std::vector<LabeledValue> values;
  values.reserve(rows.size());
  for (const auto& r : rows) {
    const Instance& inst = ds_.instance(r.row);
    if (inst.missing(a)) continue;
    values.push_back({inst[a], inst.nominal(ci), r.weight});
  }
  if (values.size() < 2) return std::nullopt;
  double known_w = 0;
  for (const auto& v : values) known_w += v.weight;

  NumericSplitOptions opt;
  opt.criterion = cfg_.criterion == SplitCriterion::gini ? SplitCriterion::gini : SplitCriterion::info_gain;
  opt.min_branch_weight = cfg_.min_leaf;
  if (cfg_.c45) {
    opt.min_branch_weight =
        std::clamp(0.1 * known_w / static_cast<double>(num_classes_), cfg_.min_leaf, std::max(cfg_.min_leaf, 25.0));
  }
  auto split = cfg_.max_points > 0 ? sampled_numeric_split(values, num_classes_, cfg_.max_points, opt)
                                   : best_numeric_split(values, num_classes_, opt);
  if (!split) return std::nullopt;

  const double total = dist.total();
  Candidate c;
  c.split.attribute = a;
  c.split.form = SplitForm::numeric_threshold;
  c.split.threshold = split->threshold;
  c.split.branch_weights = {split->left.total(), split->right.total()};
  c.gain = split->score * (known_w / total);
  if (cfg_.c45 && split->candidates > 0) c.gain -= std::log2(static_cast<double>(split->candidates)) / total;
  if (c.gain <= kMinGain) return std::nullopt;
  if (cfg_.criterion == SplitCriterion::gain_ratio) {
    const double si = split_info_with_unknown(c.split.branch_weights, cfg_.c45 ? total - known_w : 0);
    c.ratio = si > 1e-12 ? c.gain / si : 0;
    c.score = c.ratio;
  } else {
    c.score = c.gain;
  }
  return c;
}

std::optional<Candidate> Grower::choose(const std::vector<Candidate>& candidates) const {
  if (candidates.empty()) return std::nullopt;
  double threshold = kNoScore;
  if (cfg_.c45) {
    double sum = 0;
    for (const auto& c : candidates) sum += c.gain;
    threshold = sum / static_cast<double>(candidates.size()) - 1e-3;
  }
  const Candidate* best = nullptr;
  double best_merit = 0;
  for (const auto& c : candidates) {
    if (c.gain < threshold) continue;
    double merit = c.score;
    if (cfg_.merit_weights) merit *= (*cfg_.merit_weights)[c.split.attribute];
    if (!(merit > 0)) continue;
    if (!best || merit > best_merit) {
      best = &c;
      best_merit = merit;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<Rows> Grower::partition(const Rows& rows, const NodeSplit& split) const {
  std::vector<Rows> parts(split.branch_count());
  double known = 0;
  for (double w : split.branch_weights) known += w;
  const std::size_t largest = split.largest_branch();
  for (const auto& r : rows) {
    const Instance& inst = ds_.instance(r.row);
    if (auto b = split.branch_of(inst)) {
      parts[*b].push_back(r);
    } else if (cfg_.missing == MissingRouting::fractional && known > 0) {
      for (std::size_t b2 = 0; b2 < parts.size(); ++b2) {
        const double w = r.weight * split.branch_weights[b2] / known;
        if (w > 0) parts[b2].push_back({r.row, w});
      }
    } else {
      parts[largest].push_back(r);
    }
  }
  return parts;
}

Selector Grower::all_attributes() const {
  return [preds = predictors_](const NodeContext&) { return Selection{preds, preds.size()}; };
}

TreeNode Grower::grow(const Rows& rows, const Selector& selector, std::optional<std::size_t> forced_root,
                      std::size_t depth, const std::vector<double>* parent_scores) const {
  TreeNode node;
  node.distribution = distribution(rows);
  if (!splittable(node.distribution)) return node;

  std::vector<double> scores(ds_.num_attributes(), kNoScore);
  std::optional<Candidate> chosen;
  if (forced_root) {
    if (auto c = evaluate(rows, node.distribution, *forced_root)) {
      scores[*forced_root] = c->score;
      chosen = std::move(c);
    }
  } else {
    Selection sel = selector(NodeContext{depth, parent_scores});
    const std::size_t window = std::min(sel.window, sel.order.size());
    std::vector<std::size_t> first(sel.order.begin(), sel.order.begin() + static_cast<std::ptrdiff_t>(window));
    std::sort(first.begin(), first.end());
    std::vector<Candidate> candidates;
    for (std::size_t a : first) {
      if (auto c = evaluate(rows, node.distribution, a)) {
        scores[a] = c->score;
        candidates.push_back(std::move(*c));
      }
    }
    chosen = choose(candidates);
    for (std::size_t i = window; !chosen && i < sel.order.size(); ++i) {
      if (auto c = evaluate(rows, node.distribution, sel.order[i])) {
        scores[sel.order[i]] = c->score;
        chosen = choose({*c});
      }
    }
  }
  if (!chosen) return node;

  node.split = chosen->split;
  auto parts = partition(rows, *node.split);
  node.children.reserve(parts.size());
  for (auto& part : parts) node.children.push_back(grow(part, selector, std::nullopt, depth + 1, &scores));
  return node;
}

double pessimistic_extra_errors(double n, double e, double confidence) {
  if (!(n > 0)) return 0;
  if (confidence > 0.5 || confidence <= 0) throw std::invalid_argument("confidence must lie in (0, 0.5]");
  if (e < 1) {
    const double base = n * (1 - std::pow(confidence, 1 / n));
    if (e == 0) return base;
    return base + e * (pessimistic_extra_errors(n, 1, confidence) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  static thread_local double cached_cf = -1, cached_z = 0;
  if (confidence != cached_cf) {
    cached_cf = confidence;
    cached_z = boost::math::quantile(boost::math::normal(), 1 - confidence);
  }
  const double z = cached_z;
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  return r * n - e;
}

namespace {

double training_errors(const TreeNode& node) {
  if (node.is_leaf()) return node.distribution.errors();
  double e = 0;
  for (const auto& c : node.children) e += training_errors(c);
  return e;
}

void make_leaf(TreeNode& node) {
  node.split.reset();
  node.children.clear();
}

void collapse(TreeNode& node, std::size_t depth, std::size_t protected_depth) {
  if (node.is_leaf()) return;
  if (depth >= protected_depth && training_errors(node) >= node.distribution.errors() - 1e-3) {
    make_leaf(node);
    return;
  }
  for (auto& c : node.children) collapse(c, depth + 1, protected_depth);
}

double leaf_estimate(const TreeNode& node, double cf) {
  const double n = node.distribution.total();
  const double e = node.distribution.errors();
  return e + pessimistic_extra_errors(n, e, cf);
}

double estimated_errors(const TreeNode& node, double cf) {
  if (node.is_leaf()) return leaf_estimate(node, cf);
  double e = 0;
  for (const auto& c : node.children) e += estimated_errors(c, cf);
  return e;
}

void prune_rec(TreeNode& node, double cf, std::size_t depth, std::size_t protected_depth) {
  if (node.is_leaf()) return;
  for (auto& c : node.children) prune_rec(c, cf, depth + 1, protected_depth);
  if (depth < protected_depth) return;
  if (leaf_estimate(node, cf) <= estimated_errors(node, cf) + 0.1) make_leaf(node);
}

void min_depths(const TreeNode& node, std::size_t depth, std::vector<std::optional<std::size_t>>& out) {
  if (node.is_leaf()) return;
  auto& slot = out[node.split->attribute];
  if (!slot || depth < *slot) slot = depth;
  for (const auto& c : node.children) min_depths(c, depth + 1, out);
}

}  // namespace

void c45_prune(TreeNode& node, double confidence, std::size_t protected_depth) {
  collapse(node, 0, protected_depth);
  prune_rec(node, confidence, 0, protected_depth);
}

std::vector<std::optional<std::size_t>> min_split_depths(const TreeNode& root, std::size_t num_attributes) {
  std::vector<std::optional<std::size_t>> out(num_attributes);
  min_depths(root, 0, out);
  return out;
}

}  // namespace datalearner::detail
