#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "datalearner/basic.hpp"
#include "datalearner/evaluate.hpp"

using namespace datalearner;

namespace {

Dataset labelled(const std::vector<std::size_t>& per_class) {
  Attribute x{"x", AttributeKind::numeric, {}, 0};
  Attribute c{"c", AttributeKind::nominal, {}, 1};
  for (std::size_t i = 0; i < per_class.size(); ++i) c.values.push_back("c" + std::to_string(i));
  Dataset ds("l", {x, c});
  ds.set_class_index_unchecked(1);
  double v = 0;
  for (std::size_t cls = 0; cls < per_class.size(); ++cls)
    for (std::size_t i = 0; i < per_class[cls]; ++i) ds.add(Instance{{v++, static_cast<double>(cls)}});
  return ds;
}

Trainer zero_r_trainer() {
  return [](const Dataset& train, std::uint64_t, const RunControl&) -> Predictor {
    auto m = train_zero_r(train);
    return [m](const Instance& inst) { return zero_r_predict(m, inst); };
  };
}

}  // namespace

TEST_CASE("five and five over five folds") {
  const auto ds = labelled({5, 5});
  const auto folds = stratified_folds(ds, 5, 1);
  for (std::size_t f = 0; f < 5; ++f) {
    std::size_t a = 0, b = 0;
    for (std::size_t r = 0; r < ds.size(); ++r)
      if (folds[r] == f) (ds.class_of(r) == 0 ? a : b)++;
    CHECK(a == 1);
    CHECK(b == 1);
  }
}

TEST_CASE("leave-one-out") {
  const auto ds = labelled({4, 3});
  const auto folds = stratified_folds(ds, 7, 3);
  auto sorted = folds;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  const auto cv = cross_validate(ds, zero_r_trainer(), 7, 3);
  CHECK(cv.confusion.total() == 7);
  // Holding out a majority row leaves a 3/3 tie that ZeroR breaks towards c0.
  CHECK(cv.confusion.counts[0][0] == 4);
  CHECK(cv.confusion.counts[1][0] == 3);
}

TEST_CASE("stratification holds for random sizes") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(9);
    std::vector<std::size_t> per(2 + rng.uniform_index(4));
    std::size_t n = 0;
    for (auto& c : per) n += (c = rng.uniform_index(40));
    if (n < k) continue;
    const auto ds = labelled(per);
    const auto folds = stratified_folds(ds, k, trial);
    std::vector<std::vector<double>> tally(k, std::vector<double>(per.size(), 0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t r = 0; r < ds.size(); ++r) {
      REQUIRE(folds[r] < k);
      tally[folds[r]][ds.class_of(r)] += 1;
      ++sizes[folds[r]];
    }
    for (std::size_t f = 0; f < k; ++f)
      for (std::size_t c = 0; c < per.size(); ++c)
        CHECK(std::abs(tally[f][c] - static_cast<double>(per[c]) / static_cast<double>(k)) < 1.0);
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("folds are deterministic per seed") {
  const auto ds = load_arff(fixtures::uci_dir() / "ecoli.arff");
  CHECK(stratified_folds(ds, 10, 5) == stratified_folds(ds, 10, 5));
  CHECK(stratified_folds(ds, 10, 5) != stratified_folds(ds, 10, 6));
}

TEST_CASE("fold seeds and progress") {
  const auto ds = fixtures::weather();
  std::vector<std::uint64_t> seeds;
  std::vector<double> progress;
  std::mutex mu;
  const Trainer t = [&](const Dataset& train, std::uint64_t seed, const RunControl& c) {
    std::lock_guard lock(mu);
    seeds.push_back(seed);
    c.report(0.5);
    return zero_r_trainer()(train, seed, c);
  };
  const RunControl control(nullptr, [&](double f) { progress.push_back(f); });
  cross_validate(ds, t, 4, 10, control);
  CHECK(seeds == std::vector<std::uint64_t>{10, 11, 12, 13});
  CHECK(std::is_sorted(progress.begin(), progress.end()));
  CHECK(progress.back() == doctest::Approx(1.0));

  const Trainer failing = [](const Dataset&, std::uint64_t, const RunControl&) -> Predictor {
    throw TrainingError("boom");
  };
  CHECK_THROWS_WITH_AS(cross_validate(ds, failing, 4, 1), doctest::Contains("fold 1 of 4"), TrainingError);
  std::atomic<bool> cancel{true};
  CHECK_THROWS_AS(cross_validate(ds, zero_r_trainer(), 4, 1, RunControl(&cancel, {})), Cancelled);
}

TEST_CASE("metrics from a confusion matrix") {
  ConfusionMatrix cm(2);
  cm.counts = {{50, 10}, {5, 35}};
  const auto m = compute_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(85.0));
  CHECK(m.per_class[0].precision == doctest::Approx(50.0 / 55));
  CHECK(m.per_class[0].recall == doctest::Approx(50.0 / 60));
  CHECK(m.per_class[1].precision == doctest::Approx(35.0 / 45));
  CHECK(m.per_class[1].recall == doctest::Approx(35.0 / 40));
  const double p = 50.0 / 55, r = 50.0 / 60;
  CHECK(m.per_class[0].f1 == doctest::Approx(2 * p * r / (p + r)));

  ConfusionMatrix empty_col(2);
  empty_col.counts = {{7, 0}, {3, 0}};
  const auto e = compute_metrics(empty_col);
  CHECK(e.per_class[1].precision == 0.0);
  CHECK(e.per_class[1].recall == 0.0);
  CHECK(e.per_class[1].f1 == 0.0);
  CHECK(e.accuracy == doctest::Approx(70.0));
}

TEST_CASE("ZeroR fills a single confusion column") {
  const auto ds = fixtures::weather();
  const auto cv = cross_validate(ds, zero_r_trainer(), 10, 1);
  CHECK(cv.confusion.counts[0][1] == 0);
  CHECK(cv.confusion.counts[1][1] == 0);
  CHECK(cv.confusion.total() == 14);
  CHECK(cv.metrics.accuracy == doctest::Approx(100.0 * 9 / 14));
  CHECK(render_evaluation(ds, cv).find("64.2857") != std::string::npos);
}

TEST_CASE("argmax ties go low") {
  CHECK(argmax({0.3, 0.3, 0.4}) == 2);
  CHECK(argmax({0.5, 0.5}) == 0);
}
