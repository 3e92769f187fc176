#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "datalearner/control.hpp"
#include "datalearner/dataset.hpp"

namespace datalearner {

using Document = nlohmann::ordered_json;

enum class Family { classifier, clusterer, associator };
enum class ParamType { integer, real, flag };

std::string_view to_string(Family f);
std::string_view to_string(ParamType t);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::integer;
  double default_value = 0;
  double min = 0;  // inclusive; ignored for flags
  double max = 0;
  std::string description;
};

struct AlgorithmDescriptor {
  std::string id;
  Family family = Family::classifier;
  std::string title;
  std::vector<ParamSpec> params;
};

/// The registry, in a fixed order.
const std::vector<AlgorithmDescriptor>& list_algorithms();
const AlgorithmDescriptor* find_algorithm(std::string_view id);
Document algorithms_document();

struct AlgorithmSpec {
  std::string algorithm;
  /// Raw parameter text keyed by name ("true"/"false"/"1"/"0" for flags).
  std::map<std::string, std::string> params;
  std::uint64_t seed = 1;
  std::size_t folds = 10;
  /// 0-based class attribute; nullopt means the last attribute.
  std::optional<std::size_t> class_index;
};

/// Parses a spec from its JSON form: {algorithm, params?, seed?, folds?, class_index?}
/// where class_index is 0-based or "last". Throws ValidationError.
AlgorithmSpec spec_from_json(const nlohmann::json& j);

/// Spec with every parameter typed and defaulted, in declaration order.
struct ResolvedSpec {
  const AlgorithmDescriptor* algorithm = nullptr;
  std::vector<std::pair<std::string, double>> values;
  std::uint64_t seed = 1;
  std::size_t folds = 10;

  double operator[](std::string_view name) const;
};

/// Checks the spec against the registry and the dataset (class index applied).
/// Throws ValidationError; no work is started.
ResolvedSpec validate_spec(const AlgorithmSpec& spec, const Dataset& ds);

/// Applies the spec's class-index override.
Dataset apply_class_index(const Dataset& ds, const AlgorithmSpec& spec);

/// Runs synchronously and returns the result document. Throws ValidationError,
/// TrainingError or Cancelled.
Document run_algorithm(const Dataset& ds, const AlgorithmSpec& spec, const RunControl& control = {});

/// Copy of a result document without build_time_s and cv_time_s.
Document without_timings(Document doc);

Document summary_document(const DatasetSummary& s);

enum class JobStatus { pending, running, done, cancelled, failed };
std::string_view to_string(JobStatus s);

struct JobSnapshot {
  std::string id;
  JobStatus status = JobStatus::pending;
  double progress = 0;
  std::optional<Document> result;
  std::string error;

  Document to_json() const;
};

class NotFound : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Asynchronous runs. Every job runs on its own thread; the table itself is
/// guarded by one mutex.
class JobTable {
public:
  JobTable() = default;
  JobTable(const JobTable&) = delete;
  JobTable& operator=(const JobTable&) = delete;
  /// Cancels anything still running and joins.
  ~JobTable();

  /// Validates, then starts the run. Throws ValidationError without creating a job.
  std::string start(std::shared_ptr<const Dataset> ds, const AlgorithmSpec& spec);

  /// Throws NotFound.
  JobSnapshot poll(const std::string& id) const;

  /// Requests cancellation; a finished job is left as it is. Throws NotFound.
  JobSnapshot cancel(const std::string& id);

  /// Blocks until the job leaves pending/running. Throws NotFound.
  JobSnapshot wait(const std::string& id) const;

private:
  struct Job {
    std::string id;
    JobStatus status = JobStatus::pending;
    std::atomic<double> progress{0};
    std::atomic<bool> cancel{false};
    std::optional<Document> result;
    std::string error;
    std::jthread worker;
  };

  std::shared_ptr<Job> find(const std::string& id) const;
  JobSnapshot snapshot(const Job& job) const;
  void finish(Job& job, JobStatus status, std::optional<Document> result, std::string error);

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_id_ = 1;
};

}  // namespace datalearner
