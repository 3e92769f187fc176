#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "datalearner/basic.hpp"

using namespace datalearner;

namespace {

Instance row(std::initializer_list<double> v) { return Instance{std::vector<double>(v)}; }

}  // namespace

TEST_CASE("ZeroR predicts the majority, ties to the first label") {
  const auto ds = fixtures::weather();
  const auto m = train_zero_r(ds);
  CHECK(m.majority == 0);
  CHECK(m.counts == ClassDistribution{9, 5});
  const auto p = zero_r_predict(m, ds.instance(0));
  CHECK(p == std::vector<double>{1.0, 0.0});

  auto tie = ds.subset({0, 2});  // one "no", one "yes"
  CHECK(train_zero_r(tie).majority == 0);
  auto no_only = ds.subset({0, 1, 2});
  CHECK(train_zero_r(no_only).majority == 1);
}

TEST_CASE("OneR picks the attribute with fewest errors") {
  const auto ds = fixtures::weather();
  // Reference: errors of the per-value majority rule for each attribute.
  std::vector<double> errors;
  for (std::size_t a : ds.predictor_indices()) {
    std::vector<ClassDistribution> per(ds.attribute(a).arity(), ClassDistribution(2));
    for (std::size_t r = 0; r < ds.size(); ++r) per[ds.instance(r).nominal(a)].add(ds.class_of(r));
    double e = 0;
    for (const auto& d : per) e += d.errors();
    errors.push_back(e);
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) - errors.begin());
  const auto m = train_one_r(ds);
  CHECK(m.attribute == best);
  CHECK(m.attribute == 0);
  CHECK(m.training_errors == errors[best]);
  CHECK(m.outcomes == std::vector<std::size_t>{1, 0, 0});

  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto p = one_r_predict(m, ds.instance(r));
    CHECK(p[m.outcomes[ds.instance(r).nominal(0)]] == 1.0);
  }
}

TEST_CASE("OneR never does worse than ZeroR on training data") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto ds = fixtures::random_dataset(seed);
    bool ok = ds.size() > 0 && ds.class_attribute().is_nominal();
    for (const auto& a : ds.attributes()) ok = ok && !a.is_string();
    if (!ok) continue;
    bool has_class = false;
    for (std::size_t r = 0; r < ds.size(); ++r) has_class = has_class || !ds.instance(r).missing(ds.class_index());
    if (!has_class || ds.num_attributes() < 2) continue;
    const auto zr = train_zero_r(ds);
    const auto or_ = train_one_r(ds, 1);
    CHECK(or_.training_errors <= zr.counts.errors() + 1e-9);
  }
}

TEST_CASE("OneR buckets numeric attributes") {
  const auto ds = parse_arff(
      "@relation t\n@attribute x numeric\n@attribute c {a,b}\n@data\n"
      "1,a\n2,a\n3,a\n4,a\n5,a\n6,a\n7,a\n8,b\n9,b\n10,b\n11,b\n12,b\n13,b\n14,b\n15,a\n");
  const auto m = train_one_r(ds, 3);
  CHECK(m.attribute == 0);
  INFO(render_one_r(m));
  CHECK(m.cuts == std::vector<double>{7.5, 14.5});
  CHECK(m.outcomes == std::vector<std::size_t>{0, 1, 0});
  CHECK(m.cuts.size() + 1 == m.outcomes.size());
  CHECK(std::is_sorted(m.cuts.begin(), m.cuts.end()));
  for (std::size_t i = 1; i < m.outcomes.size(); ++i) CHECK(m.outcomes[i] != m.outcomes[i - 1]);
  CHECK(!render_one_r(m).empty());
}

TEST_CASE("Naive Bayes posterior") {
  const auto ds = fixtures::weather();
  const auto m = train_naive_bayes(ds);
  CHECK(m.priors[0] == doctest::Approx(0.625));

  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto p = nb_predict(m, ds.instance(r));
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
  }

  const auto all_missing = nb_predict(m, row({kMissing, kMissing, kMissing, kMissing, kMissing}));
  CHECK(all_missing[0] == doctest::Approx(0.625));
  CHECK(all_missing[1] == doctest::Approx(0.375));

  // sunny, cool, high, TRUE: brute-force Laplace-smoothed products.
  const Instance q = row({0, 2, 0, 0, kMissing});
  std::vector<double> score(2);
  for (std::size_t c = 0; c < 2; ++c) {
    double n_c = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) n_c += ds.class_of(r) == c;
    double s = (n_c + 1) / (ds.size() + 2.0);
    for (std::size_t a = 0; a < 4; ++a) {
      double match = 0;
      for (std::size_t r = 0; r < ds.size(); ++r)
        match += ds.class_of(r) == c && ds.instance(r).nominal(a) == q.nominal(a);
      s *= (match + 1) / (n_c + static_cast<double>(ds.attribute(a).arity()));
    }
    score[c] = s;
  }
  const auto p = nb_predict(m, q);
  CHECK(p[1] == doctest::Approx(score[1] / (score[0] + score[1])));
  CHECK(p[1] > p[0]);
}

TEST_CASE("Naive Bayes ignores row order") {
  const auto ds = fixtures::weather_numeric();
  std::vector<std::size_t> rev(ds.size());
  std::iota(rev.rbegin(), rev.rend(), 0);
  const auto a = train_naive_bayes(ds);
  const auto b = train_naive_bayes(ds.subset(rev));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto pa = nb_predict(a, ds.instance(r)), pb = nb_predict(b, ds.instance(r));
    for (std::size_t c = 0; c < pa.size(); ++c) CHECK(pa[c] == doctest::Approx(pb[c]));
  }
  CHECK(render_naive_bayes(a) == render_naive_bayes(b));
}

TEST_CASE("Naive Bayes survives a constant numeric attribute") {
  auto ds = fixtures::weather_numeric();
  Dataset c(ds.relation(), ds.attributes());
  for (auto inst : ds.instances()) {
    inst.values[1] = 70;
    c.add(inst);
  }
  const auto m = train_naive_bayes(c);
  const auto p = nb_predict(m, row({0, 71, 80, 0, kMissing}));
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
}
