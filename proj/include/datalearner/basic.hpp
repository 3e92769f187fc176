#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "datalearner/dataset.hpp"
#include "datalearner/split_math.hpp"

namespace datalearner {

struct ZeroRModel {
  std::vector<Attribute> schema;
  std::size_t class_index = 0;
  ClassDistribution counts;
  std::size_t majority = 0;
};

/// Single-attribute rule. Numeric attributes are bucketed: bucket i covers
/// values <= cuts[i] (the last bucket is unbounded above).
struct OneRModel {
  std::vector<Attribute> schema;
  std::size_t class_index = 0;
  std::size_t attribute = 0;
  std::vector<double> cuts;
  std::vector<std::size_t> outcomes;  // per nominal value or per bucket
  std::size_t missing_outcome = 0;
  double training_errors = 0;
};

struct NaiveBayesModel {
  std::vector<Attribute> schema;
  std::size_t class_index = 0;
  std::vector<double> priors;
  /// [attribute][class][value] smoothed P(value | class); empty for numeric attributes.
  std::vector<std::vector<std::vector<double>>> likelihoods;
  /// [attribute][class] Gaussian parameters; empty for nominal attributes.
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> stddevs;
};

/// Absolute stddev floor. Each numeric attribute also floors at a sixth of the
/// mean gap between its adjacent distinct training values.
inline constexpr double kMinStddev = 1e-6;

ZeroRModel train_zero_r(const Dataset& ds);
std::vector<double> zero_r_predict(const ZeroRModel& m, const Instance& inst);
std::string render_zero_r(const ZeroRModel& m);

OneRModel train_one_r(const Dataset& ds, std::size_t min_bucket = 6);
std::vector<double> one_r_predict(const OneRModel& m, const Instance& inst);
std::string render_one_r(const OneRModel& m);

NaiveBayesModel train_naive_bayes(const Dataset& ds);
/// Normalized posterior; missing cells are skipped.
std::vector<double> nb_predict(const NaiveBayesModel& m, const Instance& inst);
std::string render_naive_bayes(const NaiveBayesModel& m);

}  // namespace datalearner
