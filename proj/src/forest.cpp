#include "datalearner/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "datalearner/error.hpp"
#include "datalearner/random.hpp"
#include "tree_grower.hpp"

namespace datalearner {

AttributeWeights::AttributeWeights(std::size_t num_attributes, std::size_t recovery_trees)
    : eta_(recovery_trees), weight_(num_attributes, 1.0), penalised_to_(num_attributes, 1.0),
      cooldown_(num_attributes, 0) {
  if (recovery_trees < 1) throw ValidationError("recovery_trees must be at least 1");
}

void AttributeWeights::update(const TreeNode& root) {
  const auto depths = detail::min_split_depths(root, weight_.size());
  for (std::size_t a = 0; a < weight_.size(); ++a) {
    if (depths[a]) {
      weight_[a] = penalised_to_[a] = penalty_weight(*depths[a]);
      cooldown_[a] = eta_;
    } else if (cooldown_[a] > 0) {
      --cooldown_[a];
      const std::size_t done = eta_ - cooldown_[a];
      // Recompute from the penalised value so the last step lands on exactly 1.
      weight_[a] = cooldown_[a] == 0
                       ? 1.0
                       : penalised_to_[a] + (1.0 - penalised_to_[a]) * static_cast<double>(done) /
                                                static_cast<double>(eta_);
    }
  }
}

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = rng.uniform_index(n);
  return rows;
}

Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed) { return ds.subset(bootstrap_rows(ds.size(), seed)); }

namespace {

detail::Rows weighted(const Dataset& ds, const std::vector<std::size_t>& rows) {
  detail::Rows out;
  out.reserve(rows.size());
  const std::size_t ci = ds.class_index();
  for (std::size_t r : rows)
    if (!ds.instance(r).missing(ci)) out.push_back({static_cast<std::uint32_t>(r), 1.0});
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

ForestModel make_forest(const Dataset& ds, std::string algorithm) {
  ForestModel f;
  f.algorithm = std::move(algorithm);
  f.schema = ds.attributes();
  f.class_index = ds.class_index();
  return f;
}

TreeModel make_tree(const Dataset& ds, std::string algorithm, MissingRouting missing, TreeNode root) {
  TreeModel m;
  m.algorithm = std::move(algorithm);
  m.schema = ds.attributes();
  m.class_index = ds.class_index();
  m.missing = missing;
  m.root = std::move(root);
  return m;
}

void check_trees(std::size_t n) {
  if (n < 1) throw ValidationError("num_trees must be at least 1");
}

detail::GrowerConfig random_tree_config() {
  detail::GrowerConfig cfg;
  cfg.criterion = SplitCriterion::info_gain;
  cfg.min_leaf = 1;
  cfg.missing = MissingRouting::largest_branch;
  return cfg;
}

TreeNode grow_random_tree(const detail::Grower& grower, const detail::Rows& rows, std::size_t subspace, Rng& rng) {
  const std::vector<std::size_t> predictors = grower.data().predictor_indices();
  detail::Selector selector = [&](const detail::NodeContext&) {
    std::vector<std::size_t> order = predictors;
    rng.shuffle(order);
    return detail::Selection{std::move(order), subspace};
  };
  return grower.grow(rows, selector);
}

std::size_t resolve_subspace(const Dataset& ds, std::size_t subspace) {
  const std::size_t m = ds.predictor_indices().size();
  if (subspace == 0) subspace = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  return std::clamp<std::size_t>(subspace, 1, std::max<std::size_t>(m, 1));
}

}  // namespace

TreeModel train_random_tree(const Dataset& ds, std::size_t subspace, std::uint64_t seed) {
  require_classification_schema(ds);
  detail::Grower grower(ds, random_tree_config());
  Rng rng(seed);
  return make_tree(ds, "randomtree", MissingRouting::largest_branch,
                   grow_random_tree(grower, detail::class_known_rows(ds), resolve_subspace(ds, subspace), rng));
}

ForestModel train_random_forest(const Dataset& ds, const RandomForestOptions& options, const RunControl& control) {
  require_classification_schema(ds);
  check_trees(options.num_trees);
  const std::size_t subspace = resolve_subspace(ds, options.subspace);
  detail::Grower grower(ds, random_tree_config());
  ForestModel f = make_forest(ds, "randomforest");
  for (std::size_t t = 0; t < options.num_trees; ++t) {
    control.checkpoint();
    const std::uint64_t seed = derive_seed(options.seed, t);
    Rng rng(seed);
    std::vector<std::size_t> rows = all_rows(ds.size());
    if (!options.identity_bootstrap)
      for (auto& r : rows) r = rng.uniform_index(ds.size());
    f.members.push_back(make_tree(ds, "randomtree", MissingRouting::largest_branch,
                                  grow_random_tree(grower, weighted(ds, rows), subspace, rng)));
    f.member_seeds.push_back(seed);
    control.report(static_cast<double>(t + 1) / static_cast<double>(options.num_trees));
  }
  return f;
}

// ---------------------------------------------------------------- SysFor

namespace {

detail::GrowerConfig c45_config(double min_leaf) {
  detail::GrowerConfig cfg;
  cfg.criterion = SplitCriterion::gain_ratio;
  cfg.c45 = true;
  cfg.min_leaf = min_leaf;
  cfg.missing = MissingRouting::fractional;
  return cfg;
}

/// Good attributes at a node holding `rows`, best gain ratio first (ties by index).
std::vector<std::size_t> good_attributes(const detail::Grower& grower, const detail::Rows& rows, double threshold,
                                         std::optional<std::size_t> exclude = std::nullopt) {
  const ClassDistribution dist = grower.distribution(rows);
  std::vector<std::pair<double, std::size_t>> scored;
  if (!grower.splittable(dist)) return {};
  for (std::size_t a : grower.data().predictor_indices()) {
    if (exclude && a == *exclude) continue;
    if (auto c = grower.evaluate(rows, dist, a); c && c->ratio > 0) scored.emplace_back(c->ratio, a);
  }
  if (scored.empty()) return {};
  double best = 0;
  for (const auto& s : scored) best = std::max(best, s.first);
  std::vector<std::pair<double, std::size_t>> good;
  for (const auto& s : scored)
    if (s.first >= (1.0 - threshold) * best) good.push_back(s);
  std::stable_sort(good.begin(), good.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::size_t> out;
  for (const auto& g : good) out.push_back(g.second);
  return out;
}

void check_threshold(double t) {
  if (!(t >= 0 && t <= 1)) throw ValidationError("goodness_threshold must lie in [0, 1]");
}

}  // namespace

std::vector<std::size_t> sysfor_good_attributes(const Dataset& ds, double goodness_threshold) {
  require_classification_schema(ds);
  check_threshold(goodness_threshold);
  detail::Grower grower(ds, c45_config(2));
  return good_attributes(grower, detail::class_known_rows(ds), goodness_threshold);
}

ForestModel train_sysfor(const Dataset& ds, const SysForOptions& options, const RunControl& control) {
  require_classification_schema(ds);
  check_trees(options.num_trees);
  check_threshold(options.goodness_threshold);
  if (!(options.confidence > 0 && options.confidence <= 0.5))
    throw ValidationError("confidence must lie in (0, 0.5]");
  detail::Grower grower(ds, c45_config(options.min_leaf));
  const detail::Rows rows = detail::class_known_rows(ds);
  const std::vector<std::size_t> good = good_attributes(grower, rows, options.goodness_threshold);
  if (good.empty()) throw TrainingError("SysFor found no attribute with a usable split at the root");

  ForestModel f = make_forest(ds, "sysfor");
  auto progress = [&] {
    control.report(static_cast<double>(f.members.size()) / static_cast<double>(options.num_trees));
  };
  auto forced_tree = [&](const detail::Rows& r, std::size_t attr) {
    TreeNode node = grower.grow(r, grower.all_attributes(), attr);
    detail::c45_prune(node, options.confidence, 1);
    return node;
  };

  for (std::size_t i = 0; i < good.size() && f.members.size() < options.num_trees; ++i) {
    control.checkpoint();
    f.members.push_back(make_tree(ds, "c45", MissingRouting::fractional, forced_tree(rows, good[i])));
    f.member_seeds.push_back(options.seed);
    progress();
  }

  // Second level: re-root the largest impure child of each first-level tree on the good
  // attributes found at that child, taking one alternative per tree per round.
  struct Alternative {
    std::size_t base;
    std::size_t child;
    detail::Rows rows;
    std::vector<std::size_t> attrs;
  };
  std::vector<Alternative> alts;
  const std::size_t first_level = f.members.size();
  if (first_level < options.num_trees) {
    for (std::size_t t = 0; t < first_level; ++t) {
      const TreeNode& root = f.members[t].root;
      if (root.is_leaf()) continue;
      const auto parts = grower.partition(rows, *root.split);
      // Largest impure child; ties to the first. Pure children admit no split.
      std::optional<std::size_t> pick;
      for (std::size_t c = 0; c < root.children.size(); ++c) {
        const auto& d = root.children[c].distribution;
        if (d.total() > 0 && !d.pure() && (!pick || d.total() > root.children[*pick].distribution.total())) pick = c;
      }
      if (!pick) continue;
      const std::size_t child = *pick;
      const TreeNode& node = root.children[child];
      std::optional<std::size_t> current;
      if (!node.is_leaf()) current = node.split->attribute;
      alts.push_back({t, child, parts[child], good_attributes(grower, parts[child], options.goodness_threshold, current)});
    }
  }
  for (std::size_t round = 0; f.members.size() < options.num_trees; ++round) {
    bool any = false;
    for (const auto& alt : alts) {
      if (f.members.size() >= options.num_trees) break;
      if (round >= alt.attrs.size()) continue;
      any = true;
      control.checkpoint();
      TreeModel tree = f.members[alt.base];
      tree.root.children[alt.child] = forced_tree(alt.rows, alt.attrs[round]);
      f.members.push_back(std::move(tree));
      f.member_seeds.push_back(options.seed);
      progress();
    }
    if (!any) break;
  }
  return f;
}

// ---------------------------------------------------------------- ForestPA

ForestModel train_forest_pa(const Dataset& ds, const ForestPAOptions& options, const RunControl& control,
                            std::vector<AttributeWeights>* weights_after) {
  require_classification_schema(ds);
  check_trees(options.num_trees);
  AttributeWeights weights(ds.num_attributes(), options.recovery_trees);
  detail::GrowerConfig cfg = c45_config(options.min_leaf);
  std::vector<double> merit = weights.weights();
  cfg.merit_weights = &merit;
  detail::Grower grower(ds, cfg);

  ForestModel f = make_forest(ds, "forestpa");
  for (std::size_t t = 0; t < options.num_trees; ++t) {
    control.checkpoint();
    const std::uint64_t seed = derive_seed(options.seed, t);
    const auto rows = bootstrap_rows(ds.size(), seed);
    merit = weights.weights();
    TreeNode root = grower.grow(weighted(ds, rows), grower.all_attributes());
    weights.update(root);
    if (weights_after) weights_after->push_back(weights);
    f.members.push_back(make_tree(ds, "c45", MissingRouting::fractional, std::move(root)));
    f.member_seeds.push_back(seed);
    control.report(static_cast<double>(t + 1) / static_cast<double>(options.num_trees));
  }
  return f;
}

std::vector<double> forest_predict(const ForestModel& model, const Instance& inst) {
  const std::size_t k = model.schema.at(model.class_index).arity();
  std::vector<double> out(k, 0.0);
  for (const auto& m : model.members) {
    const auto p = tree_predict(m, inst);
    for (std::size_t c = 0; c < k; ++c) out[c] += p[c];
  }
  for (double& v : out) v /= static_cast<double>(model.members.size());
  return out;
}

std::string render_forest(const ForestModel& model) {
  std::string out;
  for (std::size_t i = 0; i < model.members.size(); ++i) {
    if (i) out += "\n";
    out += "Tree " + std::to_string(i + 1) + " (" + std::to_string(model.members[i].node_count()) + " nodes)\n";
    out += render_tree(model.members[i]);
  }
  return out;
}

}  // namespace datalearner
