#include "datalearner/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "datalearner/error.hpp"
#include "datalearner/random.hpp"

namespace datalearner {

FoldAssignment stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > ds.size())
    throw ValidationError("folds must lie in [2, " + std::to_string(ds.size()) + "], got " + std::to_string(k));
  if (!ds.class_attribute().is_nominal()) throw ValidationError("class attribute must be nominal");
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t ci = ds.class_index();
  const std::size_t missing_key = ds.num_classes();
  auto key = [&](std::size_t r) { return ds.instance(r).missing(ci) ? missing_key : ds.class_of(r); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  FoldAssignment folds(ds.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) folds[order[pos]] = pos % k;
  return folds;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  const std::size_t total = cm.total();
  m.accuracy = total ? 100.0 * static_cast<double>(cm.correct()) / static_cast<double>(total) : 0.0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < cm.size(); ++j) {
      row += cm.counts[c][j];
      col += cm.counts[j][c];
    }
    const double tp = static_cast<double>(cm.counts[c][c]);
    ClassMetrics cls;
    cls.precision = col ? tp / static_cast<double>(col) : 0.0;
    cls.recall = row ? tp / static_cast<double>(row) : 0.0;
    const double s = cls.precision + cls.recall;
    cls.f1 = s > 0 ? 2 * cls.precision * cls.recall / s : 0.0;
    m.per_class.push_back(cls);
  }
  return m;
}

std::size_t argmax(const std::vector<double>& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

CrossValidation cross_validate(const Dataset& ds, const Trainer& trainer, std::size_t k, std::uint64_t seed,
                               const RunControl& control) {
  const auto start = std::chrono::steady_clock::now();
  const FoldAssignment folds = stratified_folds(ds, k, seed);
  const std::size_t ci = ds.class_index();
  CrossValidation cv;
  cv.confusion = ConfusionMatrix(ds.num_classes());
  for (std::size_t f = 0; f < k; ++f) {
    control.checkpoint();
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < ds.size(); ++r) (folds[r] == f ? test_rows : train_rows).push_back(r);
    try {
      const Predictor predict = trainer(ds.subset(train_rows), seed + f,
                                       control.scaled(static_cast<double>(f) / static_cast<double>(k),
                                                      static_cast<double>(f + 1) / static_cast<double>(k)));
      for (std::size_t r : test_rows) {
        const Instance& inst = ds.instance(r);
        if (inst.missing(ci)) continue;
        cv.confusion.add(inst.nominal(ci), argmax(predict(inst)));
      }
    } catch (const Cancelled&) {
      throw;
    } catch (const std::exception& e) {
      throw TrainingError("fold " + std::to_string(f + 1) + " of " + std::to_string(k) + ": " + e.what());
    }
    control.report(static_cast<double>(f + 1) / static_cast<double>(k));
  }
  cv.metrics = compute_metrics(cv.confusion);
  cv.cv_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cv;
}

std::string render_evaluation(const Dataset& ds, const CrossValidation& cv) {
  const Attribute& cls = ds.class_attribute();
  char buf[160];
  std::string out;
  const std::size_t total = cv.confusion.total();
  std::snprintf(buf, sizeof buf, "Correctly Classified Instances   %8zu   %9.4f %%\n", cv.confusion.correct(),
                cv.metrics.accuracy);
  out += buf;
  std::snprintf(buf, sizeof buf, "Incorrectly Classified Instances %8zu   %9.4f %%\n", total - cv.confusion.correct(),
                total ? 100.0 - cv.metrics.accuracy : 0.0);
  out += buf;
  std::snprintf(buf, sizeof buf, "Total Number of Instances        %8zu\n\n", total);
  out += buf;
  out += "=== Detailed Accuracy By Class ===\n\n Precision  Recall     F-Measure  Class\n";
  for (std::size_t c = 0; c < cv.metrics.per_class.size(); ++c) {
    const auto& m = cv.metrics.per_class[c];
    std::snprintf(buf, sizeof buf, " %-10.3f %-10.3f %-10.3f %s\n", m.precision, m.recall, m.f1,
                  cls.values[c].c_str());
    out += buf;
  }
  out += "\n=== Confusion Matrix ===\n\n";
  for (std::size_t c = 0; c < cv.confusion.size(); ++c) {
    for (auto v : cv.confusion.counts[c]) {
      std::snprintf(buf, sizeof buf, " %6zu", v);
      out += buf;
    }
    out += "   | " + cls.values[c] + "\n";
  }
  return out;
}

}  // namespace datalearner
