#include "datalearner/associate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "datalearner/error.hpp"

namespace datalearner {

std::size_t min_support_count(double min_support, std::size_t transactions) {
  const double raw = std::ceil(min_support * static_cast<double>(transactions) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(raw, 0.0)));
}

bool rule_before(const ItemsetRule& a, const ItemsetRule& b) {
  // Cross-multiplied counts keep the confidence comparison exact.
  const auto lhs = a.union_count * b.antecedent_count;
  const auto rhs = b.union_count * a.antecedent_count;
  if (lhs != rhs) return lhs > rhs;
  if (a.union_count != b.union_count) return a.union_count > b.union_count;
  if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
  return a.consequent < b.consequent;
}

namespace {

using Itemset = std::vector<Item>;

bool contains(const std::vector<std::vector<char>>& present, std::size_t t, const std::vector<std::size_t>& offset,
              const Itemset& s) {
  for (const auto& it : s)
    if (!present[t][offset[it.attribute] + it.value]) return false;
  return true;
}

}  // namespace

AprioriResult mine_apriori(const Dataset& ds, const AprioriOptions& options, const RunControl& control) {
  for (const auto& a : ds.attributes())
    if (!a.is_nominal()) throw ValidationError("Apriori needs nominal attributes; '" + a.name + "' is " +
                                               std::string(to_string(a.kind)));
  if (!(options.min_support > 0 && options.min_support <= 1))
    throw ValidationError("min_support must lie in (0, 1]");
  if (!(options.min_confidence > 0 && options.min_confidence <= 1))
    throw ValidationError("min_confidence must lie in (0, 1]");

  const std::size_t na = ds.num_attributes();
  std::vector<std::size_t> offset(na + 1, 0);
  for (std::size_t a = 0; a < na; ++a) offset[a + 1] = offset[a] + ds.attribute(a).arity();

  AprioriResult result;
  result.transactions = ds.size();
  const std::size_t n = ds.size();
  if (n == 0) return result;
  const std::size_t min_count = min_support_count(options.min_support, n);

  std::vector<std::vector<char>> present(n, std::vector<char>(offset[na], 0));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t a = 0; a < na; ++a)
      if (!ds.instance(t).missing(a)) present[t][offset[a] + ds.instance(t).nominal(a)] = 1;

  std::map<Itemset, std::size_t> counts;
  std::vector<FrequentItemset> level;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t v = 0; v < ds.attribute(a).arity(); ++v) {
      std::size_t c = 0;
      for (std::size_t t = 0; t < n; ++t) c += present[t][offset[a] + v];
      if (c >= min_count) level.push_back({{Item{a, v}}, c});
    }

  std::size_t depth = 1;
  while (!level.empty()) {
    control.checkpoint();
    for (const auto& f : level) {
      counts[f.items] = f.count;
      result.itemsets.push_back(f);
    }
    // Prefix join, then prune candidates with an infrequent (k-1)-subset.
    std::vector<Itemset> candidates;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const Itemset& x = level[i].items;
        const Itemset& y = level[j].items;
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
        if (x.back().attribute == y.back().attribute) continue;
        Itemset c = x;
        c.push_back(y.back());
        bool ok = true;
        for (std::size_t drop = 0; ok && drop + 2 < c.size(); ++drop) {
          Itemset sub;
          for (std::size_t q = 0; q < c.size(); ++q)
            if (q != drop) sub.push_back(c[q]);
          ok = counts.count(sub) > 0;
        }
        if (ok) candidates.push_back(std::move(c));
      }
    }
    std::vector<FrequentItemset> next;
    for (auto& c : candidates) {
      std::size_t cnt = 0;
      for (std::size_t t = 0; t < n; ++t) cnt += contains(present, t, offset, c);
      if (cnt >= min_count) next.push_back({std::move(c), cnt});
    }
    level = std::move(next);
    ++depth;
    control.report(std::min(1.0, static_cast<double>(depth) / static_cast<double>(na + 1)));
  }

  for (const auto& f : result.itemsets) {
    const std::size_t k = f.items.size();
    if (k < 2) continue;
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << k); ++mask) {
      ItemsetRule r;
      for (std::size_t q = 0; q < k; ++q) ((mask >> q) & 1 ? r.antecedent : r.consequent).push_back(f.items[q]);
      r.union_count = f.count;
      r.antecedent_count = counts.at(r.antecedent);
      if (static_cast<double>(r.union_count) < options.min_confidence * static_cast<double>(r.antecedent_count) - 1e-9)
        continue;
      r.support = static_cast<double>(r.union_count) / static_cast<double>(n);
      r.confidence = static_cast<double>(r.union_count) / static_cast<double>(r.antecedent_count);
      result.rules.push_back(std::move(r));
    }
  }
  std::sort(result.rules.begin(), result.rules.end(), rule_before);
  if (options.max_rules > 0 && result.rules.size() > options.max_rules) result.rules.resize(options.max_rules);
  return result;
}

std::string render_rules(const Dataset& ds, const AprioriResult& result) {
  auto items = [&](const std::vector<Item>& s) {
    std::string out;
    for (const auto& it : s) {
      if (!out.empty()) out += ' ';
      out += ds.attribute(it.attribute).name + "=" + ds.attribute(it.attribute).values[it.value];
    }
    return out;
  };
  std::string out = "Apriori\n\nFrequent itemsets: " + std::to_string(result.itemsets.size()) + "\n\nBest rules found:\n\n";
  char buf[48];
  for (std::size_t i = 0; i < result.rules.size(); ++i) {
    const auto& r = result.rules[i];
    std::snprintf(buf, sizeof buf, "    conf:(%.2f)", r.confidence);
    out += std::to_string(i + 1) + ". " + items(r.antecedent) + " " + std::to_string(r.antecedent_count) +
           " ==> " + items(r.consequent) + " " + std::to_string(r.union_count) + buf + "\n";
  }
  return out;
}

}  // namespace datalearner
