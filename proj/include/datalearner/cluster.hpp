#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"

namespace datalearner {

struct ClusterModel {
  std::string algorithm;
  std::vector<Attribute> schema;
  /// Attribute left out of the distance (the class attribute).
  std::size_t excluded = 0;
  /// Centroid cells in schema layout; the excluded cell is missing.
  std::vector<Instance> centroids;
  std::vector<std::size_t> sizes;
  /// Cluster of every training instance.
  std::vector<std::size_t> assignments;
  /// Sum of squared distances from each instance to its centroid.
  double score = 0;
  std::size_t iterations = 0;
  /// Score after the initial assignment and after every iteration.
  std::vector<double> score_history;

  // Preprocessing fitted on the training data.
  std::vector<double> impute;
  std::vector<double> min;
  std::vector<double> max;
};

struct KMeansOptions {
  std::size_t k = 2;
  std::size_t max_iter = 500;
  std::uint64_t seed = 1;
};

struct FarthestFirstOptions {
  std::size_t k = 2;
  std::uint64_t seed = 1;
};

ClusterModel train_kmeans(const Dataset& ds, const KMeansOptions& options = {}, const RunControl& control = {});
ClusterModel train_farthest_first(const Dataset& ds, const FarthestFirstOptions& options = {},
                                  const RunControl& control = {});

/// Nearest centroid after imputation; ties go to the lowest index.
std::size_t assign_cluster(const ClusterModel& model, const Instance& inst);

/// Squared distance between two imputed instances under the model's normalization.
double cluster_distance(const ClusterModel& model, const Instance& a, const Instance& b);

std::string render_clusters(const ClusterModel& model);

}  // namespace datalearner
