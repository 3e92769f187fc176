#include "datalearner/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "datalearner/error.hpp"
#include "datalearner/random.hpp"
#include "datalearner/tree.hpp"

namespace datalearner {

namespace {

void require_clusterable(const Dataset& ds, std::size_t k) {
  for (const auto& a : ds.attributes())
    if (a.is_string()) throw ValidationError("string attribute '" + a.name + "' is not supported by this algorithm");
  if (k < 1) throw ValidationError("k must be at least 1");
  if (k > ds.size())
    throw ValidationError("k (" + std::to_string(k) + ") exceeds the number of instances (" +
                          std::to_string(ds.size()) + ")");
}

/// Fits imputation and min-max ranges; returns the imputed training rows.
std::vector<Instance> prepare(const Dataset& ds, ClusterModel& m) {
  const std::size_t na = ds.num_attributes();
  m.schema = ds.attributes();
  m.excluded = ds.class_index();
  m.impute.assign(na, kMissing);
  m.min.assign(na, 0);
  m.max.assign(na, 0);
  for (std::size_t a = 0; a < na; ++a) {
    if (a == m.excluded) continue;
    const Attribute& attr = ds.attribute(a);
    if (attr.is_numeric()) {
      double sum = 0, n = 0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& inst : ds.instances()) {
        if (inst.missing(a)) continue;
        sum += inst[a];
        n += 1;
        lo = std::min(lo, inst[a]);
        hi = std::max(hi, inst[a]);
      }
      m.impute[a] = n > 0 ? sum / n : 0;
      m.min[a] = n > 0 ? lo : 0;
      m.max[a] = n > 0 ? hi : 0;
    } else {
      std::vector<std::size_t> counts(attr.arity(), 0);
      for (const auto& inst : ds.instances())
        if (!inst.missing(a)) ++counts[inst.nominal(a)];
      m.impute[a] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
  }
  std::vector<Instance> rows;
  rows.reserve(ds.size());
  for (const auto& inst : ds.instances()) {
    Instance r = inst;
    for (std::size_t a = 0; a < na; ++a) {
      if (a == m.excluded)
        r.values[a] = kMissing;
      else if (r.missing(a))
        r.values[a] = m.impute[a];
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Instance imputed(const ClusterModel& m, const Instance& inst) {
  Instance r = inst;
  for (std::size_t a = 0; a < r.values.size(); ++a) {
    if (a == m.excluded)
      r.values[a] = kMissing;
    else if (r.missing(a))
      r.values[a] = m.impute[a];
  }
  return r;
}

std::size_t nearest(const ClusterModel& m, const std::vector<Instance>& centers, const Instance& x, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = cluster_distance(m, x, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

/// Assigns every row; returns whether any assignment changed and updates the score.
bool assign_all(ClusterModel& m, const std::vector<Instance>& rows) {
  bool changed = false;
  m.score = 0;
  m.sizes.assign(m.centroids.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double d = 0;
    const std::size_t c = nearest(m, m.centroids, rows[i], &d);
    if (m.assignments[i] != c) changed = true;
    m.assignments[i] = c;
    ++m.sizes[c];
    m.score += d;
  }
  m.score_history.push_back(m.score);
  return changed;
}

void update_centroids(ClusterModel& m, const std::vector<Instance>& rows) {
  const std::size_t na = m.schema.size();
  const std::size_t k = m.centroids.size();
  std::vector<Instance> next(k, Instance{std::vector<double>(na, kMissing)});
  for (std::size_t a = 0; a < na; ++a) {
    if (a == m.excluded) continue;
    if (m.schema[a].is_numeric()) {
      std::vector<double> sum(k, 0);
      for (std::size_t i = 0; i < rows.size(); ++i) sum[m.assignments[i]] += rows[i][a];
      for (std::size_t c = 0; c < k; ++c)
        if (m.sizes[c] > 0) next[c].values[a] = sum[c] / static_cast<double>(m.sizes[c]);
    } else {
      std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(m.schema[a].arity(), 0));
      for (std::size_t i = 0; i < rows.size(); ++i) ++counts[m.assignments[i]][rows[i].nominal(a)];
      for (std::size_t c = 0; c < k; ++c)
        next[c].values[a] =
            static_cast<double>(std::max_element(counts[c].begin(), counts[c].end()) - counts[c].begin());
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (m.sizes[c] > 0) {
      m.centroids[c] = std::move(next[c]);
      continue;
    }
    // Empty cluster: reseed to the point farthest from where it was.
    std::size_t far = 0;
    double far_d = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double d = cluster_distance(m, rows[i], m.centroids[c]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    m.centroids[c] = rows[far];
  }
}

}  // namespace

double cluster_distance(const ClusterModel& m, const Instance& x, const Instance& y) {
  double d = 0;
  for (std::size_t a = 0; a < m.schema.size(); ++a) {
    if (a == m.excluded) continue;
    if (m.schema[a].is_numeric()) {
      const double range = m.max[a] - m.min[a];
      if (range <= 0) continue;
      const double diff = (x[a] - y[a]) / range;
      d += diff * diff;
    } else if (x[a] != y[a]) {
      d += 1;
    }
  }
  return d;
}

ClusterModel train_kmeans(const Dataset& ds, const KMeansOptions& options, const RunControl& control) {
  require_clusterable(ds, options.k);
  if (options.max_iter < 1) throw ValidationError("max_iter must be at least 1");
  ClusterModel m;
  m.algorithm = "kmeans";
  const std::vector<Instance> rows = prepare(ds, m);

  // Seeded distinct initial centroids: walk a shuffled order, skipping duplicates.
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(options.seed);
  rng.shuffle(order);
  for (std::size_t i : order) {
    if (m.centroids.size() == options.k) break;
    const bool dup = std::any_of(m.centroids.begin(), m.centroids.end(),
                                 [&](const Instance& c) { return cluster_distance(m, c, rows[i]) == 0; });
    if (!dup) m.centroids.push_back(rows[i]);
  }
  for (std::size_t i : order) {
    if (m.centroids.size() == options.k) break;
    m.centroids.push_back(rows[i]);
  }

  m.assignments.assign(rows.size(), options.k);
  assign_all(m, rows);
  while (m.iterations < options.max_iter) {
    control.checkpoint();
    update_centroids(m, rows);
    const bool changed = assign_all(m, rows);
    ++m.iterations;
    control.report(static_cast<double>(m.iterations) / static_cast<double>(options.max_iter));
    if (!changed) break;
  }
  // Centroids always describe the final assignment.
  update_centroids(m, rows);
  return m;
}

ClusterModel train_farthest_first(const Dataset& ds, const FarthestFirstOptions& options, const RunControl& control) {
  require_clusterable(ds, options.k);
  ClusterModel m;
  m.algorithm = "farthestfirst";
  const std::vector<Instance> rows = prepare(ds, m);
  Rng rng(options.seed);
  std::vector<double> min_dist(rows.size(), std::numeric_limits<double>::infinity());
  std::size_t next = rng.uniform_index(rows.size());
  while (m.centroids.size() < options.k) {
    control.checkpoint();
    m.centroids.push_back(rows[next]);
    std::size_t far = 0;
    double far_d = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      min_dist[i] = std::min(min_dist[i], cluster_distance(m, rows[i], rows[next]));
      if (min_dist[i] > far_d) {
        far_d = min_dist[i];
        far = i;
      }
    }
    next = far;
    control.report(static_cast<double>(m.centroids.size()) / static_cast<double>(options.k));
  }
  m.assignments.assign(rows.size(), options.k);
  assign_all(m, rows);
  return m;
}

std::size_t assign_cluster(const ClusterModel& model, const Instance& inst) {
  check_schema(model.schema, inst);
  return nearest(model, model.centroids, imputed(model, inst), nullptr);
}

std::string render_clusters(const ClusterModel& m) {
  std::string out = m.algorithm == "kmeans" ? "k-means\n" : "FarthestFirst\n";
  char buf[96];
  if (m.algorithm == "kmeans") {
    std::snprintf(buf, sizeof buf, "Iterations: %zu\nWithin-cluster sum of squared errors: %.6g\n", m.iterations,
                  m.score);
    out += buf;
  }
  for (std::size_t c = 0; c < m.centroids.size(); ++c) {
    std::snprintf(buf, sizeof buf, "\nCluster %zu (%zu instances)\n", c, m.sizes[c]);
    out += buf;
    for (std::size_t a = 0; a < m.schema.size(); ++a) {
      if (a == m.excluded) continue;
      const Attribute& attr = m.schema[a];
      out += "  " + attr.name + ": ";
      if (attr.is_numeric()) {
        std::snprintf(buf, sizeof buf, "%.4f", m.centroids[c][a]);
        out += buf;
      } else {
        out += attr.values[m.centroids[c].nominal(a)];
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace datalearner
