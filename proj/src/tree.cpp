#include "datalearner/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "datalearner/error.hpp"
#include "datalearner/random.hpp"
#include "tree_grower.hpp"

namespace datalearner {

std::optional<std::size_t> NodeSplit::branch_of(const Instance& inst) const {
  if (inst.missing(attribute)) return std::nullopt;
  switch (form) {
    case SplitForm::nominal_multiway: return inst.nominal(attribute);
    case SplitForm::numeric_threshold: return inst[attribute] <= threshold ? 0 : 1;
    case SplitForm::nominal_one_vs_rest: return inst.nominal(attribute) == value ? 0 : 1;
  }
  return std::nullopt;
}

std::size_t NodeSplit::largest_branch() const noexcept {
  std::size_t best = 0;
  for (std::size_t b = 1; b < branch_weights.size(); ++b)
    if (branch_weights[b] > branch_weights[best]) best = b;
  return best;
}

namespace {

std::size_t count_nodes(const TreeNode& n, bool leaves_only) {
  std::size_t c = (!leaves_only || n.is_leaf()) ? 1 : 0;
  for (const auto& ch : n.children) c += count_nodes(ch, leaves_only);
  return c;
}

std::size_t node_depth(const TreeNode& n) {
  std::size_t d = 0;
  for (const auto& ch : n.children) d = std::max(d, 1 + node_depth(ch));
  return d;
}

}  // namespace

std::size_t TreeModel::node_count() const { return count_nodes(root, false); }
std::size_t TreeModel::leaf_count() const { return count_nodes(root, true); }
std::size_t TreeModel::depth() const { return node_depth(root); }

void check_schema(const std::vector<Attribute>& schema, const Instance& inst) {
  if (inst.values.size() != schema.size())
    throw ValidationError("instance has " + std::to_string(inst.values.size()) + " values, schema has " +
                          std::to_string(schema.size()));
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (inst.missing(i) || !schema[i].is_nominal()) continue;
    const double v = inst[i];
    if (v < 0 || v != std::floor(v) || v >= static_cast<double>(schema[i].arity()))
      throw ValidationError("value of attribute '" + schema[i].name + "' is not a declared nominal value");
  }
}

namespace {

TreeModel make_model(const Dataset& ds, std::string algorithm, MissingRouting missing) {
  TreeModel m;
  m.algorithm = std::move(algorithm);
  m.schema = ds.attributes();
  m.class_index = ds.class_index();
  m.missing = missing;
  return m;
}

}  // namespace

TreeModel train_c45(const Dataset& ds, const C45Options& options) {
  require_classification_schema(ds);
  if (!(options.confidence > 0 && options.confidence <= 0.5))
    throw ValidationError("confidence must lie in (0, 0.5]");
  if (!(options.min_leaf >= 1)) throw ValidationError("min_leaf must be at least 1");
  detail::GrowerConfig cfg;
  cfg.criterion = SplitCriterion::gain_ratio;
  cfg.c45 = true;
  cfg.min_leaf = options.min_leaf;
  cfg.missing = MissingRouting::fractional;
  detail::Grower grower(ds, cfg);
  TreeModel m = make_model(ds, "c45", MissingRouting::fractional);
  m.root = grower.grow(detail::class_known_rows(ds), grower.all_attributes());
  if (options.prune) detail::c45_prune(m.root, options.confidence);
  return m;
}

namespace {

/// Held-out class counts routed through the grown tree, one per node (pre-order).
void route_holdout(const Dataset& ds, const TreeNode& node, const detail::Rows& rows,
                   std::vector<ClassDistribution>& out, std::size_t& next) {
  const std::size_t me = next++;
  ClassDistribution d(ds.num_classes());
  for (const auto& r : rows) d.add(ds.class_of(r.row), r.weight);
  out[me] = d;
  if (node.is_leaf()) return;
  std::vector<detail::Rows> parts(node.children.size());
  for (const auto& r : rows) {
    auto b = node.split->branch_of(ds.instance(r.row));
    parts[b ? *b : node.split->largest_branch()].push_back(r);
  }
  for (std::size_t c = 0; c < node.children.size(); ++c) route_holdout(ds, node.children[c], parts[c], out, next);
}

/// Reduced-error pruning; returns held-out errors of the (possibly pruned) subtree.
double rep_prune(TreeNode& node, const std::vector<ClassDistribution>& holdout, std::size_t& next) {
  const ClassDistribution& h = holdout[next++];
  const double leaf_errors = h.total() - h[node.predicted()];
  if (node.is_leaf()) return leaf_errors;
  double subtree_errors = 0;
  for (auto& c : node.children) subtree_errors += rep_prune(c, holdout, next);
  if (leaf_errors <= subtree_errors) {
    // Pre-order indices of the removed subtree were already consumed above.
    node.split.reset();
    node.children.clear();
    return leaf_errors;
  }
  return subtree_errors;
}

/// Adds held-out counts into every surviving node.
void backfit(const Dataset& ds, TreeNode& node, const detail::Rows& rows) {
  for (const auto& r : rows) node.distribution.add(ds.class_of(r.row), r.weight);
  if (node.is_leaf()) return;
  std::vector<detail::Rows> parts(node.children.size());
  for (const auto& r : rows) {
    auto b = node.split->branch_of(ds.instance(r.row));
    parts[b ? *b : node.split->largest_branch()].push_back(r);
  }
  for (std::size_t c = 0; c < node.children.size(); ++c) backfit(ds, node.children[c], parts[c]);
}

}  // namespace

TreeModel train_rep_tree(const Dataset& ds, const RepTreeOptions& options) {
  require_classification_schema(ds);
  if (options.prune_folds < 2) throw ValidationError("prune_folds must be at least 2");
  if (!(options.min_leaf >= 1)) throw ValidationError("min_leaf must be at least 1");
  detail::Rows all = detail::class_known_rows(ds);
  if (all.size() < options.prune_folds)
    throw ValidationError("REPTree needs at least prune_folds (" + std::to_string(options.prune_folds) +
                          ") instances with a known class");

  // Stratified split: shuffle, group by class, deal positions round the folds. Fold 0 is held out.
  Rng rng(options.seed);
  rng.shuffle(all);
  std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    return ds.class_of(a.row) < ds.class_of(b.row);
  });
  detail::Rows grow_rows, holdout;
  for (std::size_t i = 0; i < all.size(); ++i) (i % options.prune_folds == 0 ? holdout : grow_rows).push_back(all[i]);

  detail::GrowerConfig cfg;
  cfg.criterion = SplitCriterion::info_gain;
  cfg.min_leaf = options.min_leaf;
  cfg.missing = MissingRouting::largest_branch;
  detail::Grower grower(ds, cfg);
  TreeModel m = make_model(ds, "reptree", MissingRouting::largest_branch);
  m.root = grower.grow(grow_rows, grower.all_attributes());
  if (options.prune) {
    std::vector<ClassDistribution> counts(m.node_count());
    std::size_t next = 0;
    route_holdout(ds, m.root, holdout, counts, next);
    next = 0;
    rep_prune(m.root, counts, next);
    backfit(ds, m.root, holdout);
  }
  return m;
}

TreeModel train_cart_spaarc(const Dataset& ds, const SpaarcOptions& options) {
  require_classification_schema(ds);
  if (!(options.min_leaf >= 1)) throw ValidationError("min_leaf must be at least 1");
  if (options.split_sampling && options.max_points < 2) throw ValidationError("max_points must be at least 2");
  detail::GrowerConfig cfg;
  cfg.criterion = SplitCriterion::gini;
  cfg.binary_nominal = true;
  cfg.min_leaf = options.min_leaf;
  cfg.missing = MissingRouting::largest_branch;
  cfg.max_points = options.split_sampling ? options.max_points : 0;
  detail::Grower grower(ds, cfg);

  detail::Selector selector = grower.all_attributes();
  if (options.attr_sampling) {
    const std::vector<std::size_t> predictors = ds.predictor_indices();
    const std::size_t window =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(predictors.size()))));
    // Tie-break priority, drawn once per tree.
    std::vector<std::size_t> priority(ds.num_attributes(), 0);
    std::vector<std::size_t> perm = predictors;
    Rng rng(options.seed);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) priority[perm[i]] = i;

    selector = [predictors, window, priority](const detail::NodeContext& ctx) {
      if (ctx.depth % 2 == 0 || ctx.parent_scores == nullptr) return detail::Selection{predictors, predictors.size()};
      std::vector<std::size_t> ranked = predictors;
      const auto& s = *ctx.parent_scores;
      std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return priority[a] < priority[b];
      });
      ranked.resize(std::min(window, ranked.size()));
      return detail::Selection{ranked, ranked.size()};
    };
  }

  TreeModel m = make_model(ds, options.split_sampling || options.attr_sampling ? "spaarc" : "cart",
                           MissingRouting::largest_branch);
  m.root = grower.grow(detail::class_known_rows(ds), selector);
  return m;
}

namespace {

void accumulate(const TreeModel& m, const TreeNode& node, const TreeNode* parent, const Instance& inst, double weight,
                std::vector<double>& out) {
  if (node.is_leaf()) {
    // An empty leaf falls back to its parent's distribution.
    const TreeNode& source = node.distribution.total() > 0 || parent == nullptr ? node : *parent;
    const auto p = source.distribution.normalized();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weight * p[c];
    return;
  }
  const NodeSplit& s = *node.split;
  if (auto b = s.branch_of(inst)) {
    accumulate(m, node.children[*b], &node, inst, weight, out);
    return;
  }
  const double known = std::accumulate(s.branch_weights.begin(), s.branch_weights.end(), 0.0);
  if (m.missing == MissingRouting::fractional && known > 0) {
    for (std::size_t b = 0; b < node.children.size(); ++b)
      if (s.branch_weights[b] > 0) accumulate(m, node.children[b], &node, inst, weight * s.branch_weights[b] / known, out);
    return;
  }
  accumulate(m, node.children[s.largest_branch()], &node, inst, weight, out);
}

std::string format_weight(double w) {
  char buf[32];
  if (std::abs(w - std::round(w)) < 1e-9)
    std::snprintf(buf, sizeof buf, "%.0f", w);
  else
    std::snprintf(buf, sizeof buf, "%.2f", w);
  return buf;
}

std::string format_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

std::string format_distribution(const ClassDistribution& d) {
  std::string s = "[";
  for (std::size_t c = 0; c < d.size(); ++c) {
    if (c) s += '/';
    s += format_weight(d[c]);
  }
  return s + "]";
}

std::string condition(const TreeModel& m, const NodeSplit& s, std::size_t branch) {
  const Attribute& a = m.schema[s.attribute];
  switch (s.form) {
    case SplitForm::nominal_multiway: return a.name + " = " + a.values[branch];
    case SplitForm::numeric_threshold:
      return a.name + (branch == 0 ? " <= " : " > ") + format_threshold(s.threshold);
    case SplitForm::nominal_one_vs_rest: return a.name + (branch == 0 ? " = " : " != ") + a.values[s.value];
  }
  return {};
}

void render_node(const TreeModel& m, const TreeNode& node, std::size_t depth, const std::string& label,
                 std::string& out) {
  for (std::size_t i = 1; i < depth; ++i) out += "|  ";
  out += label + ": ";
  if (node.is_leaf())
    out += m.schema[m.class_index].values[node.predicted()];
  else
    out += "split " + m.schema[node.split->attribute].name;
  out += " " + format_distribution(node.distribution) + "\n";
  if (node.is_leaf()) return;
  for (std::size_t b = 0; b < node.children.size(); ++b)
    render_node(m, node.children[b], depth + 1, condition(m, *node.split, b), out);
}

}  // namespace

std::vector<double> tree_predict(const TreeModel& model, const Instance& inst) {
  check_schema(model.schema, inst);
  const std::size_t k = model.schema[model.class_index].arity();
  std::vector<double> out(k, 0.0);
  accumulate(model, model.root, nullptr, inst, 1.0, out);
  const double t = std::accumulate(out.begin(), out.end(), 0.0);
  if (t > 0)
    for (double& v : out) v /= t;
  else
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(k));
  return out;
}

std::string render_tree(const TreeModel& model) {
  std::string out;
  render_node(model, model.root, 0, "root", out);
  return out;
}

}  // namespace datalearner
