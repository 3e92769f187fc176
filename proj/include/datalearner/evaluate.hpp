#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"

namespace datalearner {

/// Fold index per instance.
using FoldAssignment = std::vector<std::size_t>;

/// Seeded shuffle, stable grouping by class label, then fold = position mod k.
/// Instances with a missing class are grouped after every label.
FoldAssignment stratified_folds(const Dataset& ds, std::size_t k = 10, std::uint64_t seed = 1);

/// Rows are actual classes, columns predicted.
struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::size_t k = 0) : counts(k, std::vector<std::size_t>(k, 0)) {}
  std::size_t size() const noexcept { return counts.size(); }
  std::size_t total() const;
  std::size_t correct() const;
  void add(std::size_t actual, std::size_t predicted) { ++counts[actual][predicted]; }

  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct Metrics {
  double accuracy = 0;  // percent
  std::vector<ClassMetrics> per_class;
};

Metrics compute_metrics(const ConfusionMatrix& cm);

using Predictor = std::function<std::vector<double>(const Instance&)>;
/// Trains on a dataset with the given seed and returns a predictor. The control
/// carries cancellation and maps progress into the fold's share of the run.
using Trainer = std::function<Predictor(const Dataset& train, std::uint64_t seed, const RunControl& control)>;

struct CrossValidation {
  ConfusionMatrix confusion;
  Metrics metrics;
  double cv_time_s = 0;
};

/// Index of the largest probability; ties go to the lowest index.
std::size_t argmax(const std::vector<double>& p);

/// Trains on k-1 folds and predicts the held-out one, for every fold. Fold f
/// trains with seed + f. Training failures are rethrown naming the fold.
/// Checkpoints and reports progress once per fold.
CrossValidation cross_validate(const Dataset& ds, const Trainer& trainer, std::size_t k = 10, std::uint64_t seed = 1,
                               const RunControl& control = {});

/// Human-readable summary, per-class table and confusion matrix.
std::string render_evaluation(const Dataset& ds, const CrossValidation& cv);

}  // namespace datalearner
