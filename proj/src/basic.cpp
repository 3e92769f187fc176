#include "datalearner/basic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "datalearner/error.hpp"
#include "datalearner/tree.hpp"

namespace datalearner {

namespace {

ClassDistribution class_counts(const Dataset& ds) {
  ClassDistribution d(ds.num_classes());
  const std::size_t ci = ds.class_index();
  for (const auto& inst : ds.instances())
    if (!inst.missing(ci)) d.add(inst.nominal(ci));
  return d;
}

std::vector<double> one_hot(std::size_t k, std::size_t c) {
  std::vector<double> v(k, 0.0);
  v[c] = 1.0;
  return v;
}

const std::string& label(const std::vector<Attribute>& schema, std::size_t class_index, std::size_t c) {
  return schema[class_index].values[c];
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- ZeroR

ZeroRModel train_zero_r(const Dataset& ds) {
  require_classification_schema(ds);
  ZeroRModel m;
  m.schema = ds.attributes();
  m.class_index = ds.class_index();
  m.counts = class_counts(ds);
  if (!(m.counts.total() > 0)) throw ValidationError("ZeroR needs at least one instance with a known class");
  m.majority = m.counts.argmax();
  return m;
}

std::vector<double> zero_r_predict(const ZeroRModel& m, const Instance& inst) {
  check_schema(m.schema, inst);
  return one_hot(m.counts.size(), m.majority);
}

std::string render_zero_r(const ZeroRModel& m) {
  return "ZeroR predicts class value: " + label(m.schema, m.class_index, m.majority) + "\n";
}

// ---------------------------------------------------------------- OneR

namespace {

struct Rule {
  std::vector<double> cuts;
  std::vector<std::size_t> outcomes;
  std::size_t missing_outcome = 0;
  double errors = 0;
};

Rule nominal_rule(const Dataset& ds, std::size_t a, std::size_t fallback) {
  const std::size_t ci = ds.class_index();
  const std::size_t k = ds.num_classes();
  std::vector<ClassDistribution> per(ds.attribute(a).arity(), ClassDistribution(k));
  ClassDistribution missing(k);
  for (const auto& inst : ds.instances()) {
    if (inst.missing(ci)) continue;
    (inst.missing(a) ? missing : per[inst.nominal(a)]).add(inst.nominal(ci));
  }
  Rule r;
  for (const auto& d : per) {
    r.outcomes.push_back(d.total() > 0 ? d.argmax() : fallback);
    r.errors += d.errors();
  }
  r.missing_outcome = missing.total() > 0 ? missing.argmax() : fallback;
  r.errors += missing.errors();
  return r;
}

Rule numeric_rule(const Dataset& ds, std::size_t a, std::size_t min_bucket, std::size_t fallback) {
  const std::size_t ci = ds.class_index();
  const std::size_t k = ds.num_classes();
  std::vector<std::pair<double, std::size_t>> known;
  ClassDistribution missing(k);
  for (const auto& inst : ds.instances()) {
    if (inst.missing(ci)) continue;
    if (inst.missing(a))
      missing.add(inst.nominal(ci));
    else
      known.emplace_back(inst[a], inst.nominal(ci));
  }
  std::stable_sort(known.begin(), known.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  // Sweep: close a bucket once its majority reaches min_bucket and the next value
  // neither repeats the last one nor continues the majority class.
  std::vector<ClassDistribution> buckets;
  std::vector<double> cuts;
  std::size_t i = 0;
  const std::size_t n = known.size();
  while (i < n) {
    ClassDistribution d(k);
    while (i < n) {
      d.add(known[i].second);
      ++i;
      if (d[d.argmax()] >= static_cast<double>(min_bucket)) {
        const std::size_t maj = d.argmax();
        while (i < n && (known[i].first == known[i - 1].first || known[i].second == maj)) {
          d.add(known[i].second);
          ++i;
        }
        break;
      }
    }
    buckets.push_back(d);
    if (i < n) cuts.push_back((known[i - 1].first + known[i].first) / 2);
  }

  Rule r;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    const std::size_t outcome = buckets[b].argmax();
    // Adjacent buckets predicting the same class merge.
    if (!r.outcomes.empty() && r.outcomes.back() == outcome) {
      r.cuts.back() = b < cuts.size() ? cuts[b] : std::numeric_limits<double>::infinity();
    } else {
      r.outcomes.push_back(outcome);
      r.cuts.push_back(b < cuts.size() ? cuts[b] : std::numeric_limits<double>::infinity());
    }
    r.errors += buckets[b].errors();
  }
  if (r.outcomes.empty()) {
    r.outcomes.push_back(fallback);
    r.cuts.push_back(std::numeric_limits<double>::infinity());
  }
  r.cuts.pop_back();
  r.missing_outcome = missing.total() > 0 ? missing.argmax() : fallback;
  r.errors += missing.errors();
  return r;
}

}  // namespace

OneRModel train_one_r(const Dataset& ds, std::size_t min_bucket) {
  require_classification_schema(ds);
  if (min_bucket < 1) throw ValidationError("min_bucket must be at least 1");
  const ClassDistribution counts = class_counts(ds);
  if (!(counts.total() > 0)) throw ValidationError("OneR needs at least one instance with a known class");
  const std::size_t fallback = counts.argmax();

  std::optional<Rule> best;
  std::size_t best_attr = 0;
  for (std::size_t a : ds.predictor_indices()) {
    const Attribute& attr = ds.attribute(a);
    Rule r = attr.is_nominal() ? nominal_rule(ds, a, fallback) : numeric_rule(ds, a, min_bucket, fallback);
    if (!best || r.errors < best->errors) {
      best = std::move(r);
      best_attr = a;
    }
  }
  if (!best) throw ValidationError("OneR found no usable attribute");

  OneRModel m;
  m.schema = ds.attributes();
  m.class_index = ds.class_index();
  m.attribute = best_attr;
  m.cuts = std::move(best->cuts);
  m.outcomes = std::move(best->outcomes);
  m.missing_outcome = best->missing_outcome;
  m.training_errors = best->errors;
  return m;
}

std::vector<double> one_r_predict(const OneRModel& m, const Instance& inst) {
  check_schema(m.schema, inst);
  const std::size_t k = m.schema[m.class_index].arity();
  const std::size_t a = m.attribute;
  if (inst.missing(a)) return one_hot(k, m.missing_outcome);
  if (m.schema[a].is_nominal()) return one_hot(k, m.outcomes[inst.nominal(a)]);
  const auto it = std::lower_bound(m.cuts.begin(), m.cuts.end(), inst[a]);
  return one_hot(k, m.outcomes[static_cast<std::size_t>(it - m.cuts.begin())]);
}

std::string render_one_r(const OneRModel& m) {
  const Attribute& a = m.schema[m.attribute];
  std::string out = a.name + ":\n";
  if (a.is_nominal()) {
    for (std::size_t v = 0; v < a.arity(); ++v)
      out += "\t" + a.values[v] + "\t-> " + label(m.schema, m.class_index, m.outcomes[v]) + "\n";
  } else {
    for (std::size_t b = 0; b < m.outcomes.size(); ++b) {
      std::string range = "any";
      if (b < m.cuts.size())
        range = "<= " + fmt("%.6g", m.cuts[b]);
      else if (!m.cuts.empty())
        range = "> " + fmt("%.6g", m.cuts.back());
      out += "\t" + range + "\t-> " + label(m.schema, m.class_index, m.outcomes[b]) + "\n";
    }
  }
  out += "\t?\t-> " + label(m.schema, m.class_index, m.missing_outcome) + "\n";
  return out;
}

// ---------------------------------------------------------------- NaiveBayes

NaiveBayesModel train_naive_bayes(const Dataset& ds) {
  require_classification_schema(ds);
  const std::size_t ci = ds.class_index();
  const std::size_t k = ds.num_classes();
  const std::size_t na = ds.num_attributes();

  NaiveBayesModel m;
  m.schema = ds.attributes();
  m.class_index = ci;
  const ClassDistribution counts = class_counts(ds);
  const double n = counts.total();
  for (std::size_t c = 0; c < k; ++c) m.priors.push_back((counts[c] + 1) / (n + static_cast<double>(k)));

  m.likelihoods.resize(na);
  m.means.resize(na);
  m.stddevs.resize(na);
  for (std::size_t a : ds.predictor_indices()) {
    const Attribute& attr = ds.attribute(a);
    if (attr.is_nominal()) {
      std::vector<std::vector<double>> table(k, std::vector<double>(attr.arity(), 1.0));
      for (const auto& inst : ds.instances())
        if (!inst.missing(ci) && !inst.missing(a)) table[inst.nominal(ci)][inst.nominal(a)] += 1;
      for (auto& row : table) {
        const double t = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& p : row) p /= t;
      }
      m.likelihoods[a] = std::move(table);
      continue;
    }
    // Precision of the recorded values: mean gap between adjacent distinct values.
    std::vector<double> seen;
    for (const auto& inst : ds.instances())
      if (!inst.missing(ci) && !inst.missing(a)) seen.push_back(inst[a]);
    std::sort(seen.begin(), seen.end());
    double gaps = 0, distinct = 0;
    for (std::size_t i = 1; i < seen.size(); ++i)
      if (seen[i] != seen[i - 1]) {
        gaps += seen[i] - seen[i - 1];
        distinct += 1;
      }
    const double floor = std::max(kMinStddev, distinct > 0 ? gaps / distinct / 6 : 0.0);

    std::vector<double> sum(k, 0), sumsq(k, 0), cnt(k, 0);
    for (const auto& inst : ds.instances()) {
      if (inst.missing(ci) || inst.missing(a)) continue;
      const std::size_t c = inst.nominal(ci);
      sum[c] += inst[a];
      sumsq[c] += inst[a] * inst[a];
      cnt[c] += 1;
    }
    m.means[a].resize(k);
    m.stddevs[a].resize(k);
    for (std::size_t c = 0; c < k; ++c) {
      m.means[a][c] = cnt[c] > 0 ? sum[c] / cnt[c] : 0;
      const double var = cnt[c] > 0 ? std::max(0.0, sumsq[c] / cnt[c] - m.means[a][c] * m.means[a][c]) : 0;
      m.stddevs[a][c] = std::max(std::sqrt(var), floor);
    }
  }
  return m;
}

std::vector<double> nb_predict(const NaiveBayesModel& m, const Instance& inst) {
  check_schema(m.schema, inst);
  const std::size_t k = m.priors.size();
  std::vector<double> logp(k);
  for (std::size_t c = 0; c < k; ++c) logp[c] = std::log(m.priors[c]);
  for (std::size_t a = 0; a < m.schema.size(); ++a) {
    if (a == m.class_index || inst.missing(a)) continue;
    if (m.schema[a].is_nominal()) {
      for (std::size_t c = 0; c < k; ++c) logp[c] += std::log(m.likelihoods[a][c][inst.nominal(a)]);
    } else {
      for (std::size_t c = 0; c < k; ++c) {
        const double sd = m.stddevs[a][c];
        const double z = (inst[a] - m.means[a][c]) / sd;
        logp[c] += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2 * M_PI);
      }
    }
  }
  const double mx = *std::max_element(logp.begin(), logp.end());
  double t = 0;
  for (double& v : logp) t += (v = std::exp(v - mx));
  for (double& v : logp) v /= t;
  return logp;
}

std::string render_naive_bayes(const NaiveBayesModel& m) {
  const Attribute& cls = m.schema[m.class_index];
  std::string out = "Naive Bayes\n\nClass priors\n";
  for (std::size_t c = 0; c < m.priors.size(); ++c) out += "  " + cls.values[c] + ": " + fmt("%.4f", m.priors[c]) + "\n";
  for (std::size_t a = 0; a < m.schema.size(); ++a) {
    if (a == m.class_index) continue;
    const Attribute& attr = m.schema[a];
    out += "\n" + attr.name + "\n";
    for (std::size_t c = 0; c < m.priors.size(); ++c) {
      out += "  " + cls.values[c] + ":";
      if (attr.is_nominal()) {
        for (std::size_t v = 0; v < attr.arity(); ++v)
          out += " " + attr.values[v] + "=" + fmt("%.4f", m.likelihoods[a][c][v]);
      } else {
        out += " mean=" + fmt("%.4f", m.means[a][c]) + " stddev=" + fmt("%.4f", m.stddevs[a][c]);
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace datalearner
