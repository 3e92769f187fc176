#include <chrono>
#include <memory>
#include <thread>
#include <vector>

#include "doctest.h"

#include "../fixtures.hpp"
#include "datalearner/engine.hpp"

using namespace datalearner;

namespace {

AlgorithmSpec spec(std::string algo, std::map<std::string, std::string> params = {}, std::size_t folds = 10) {
  AlgorithmSpec s;
  s.algorithm = std::move(algo);
  s.params = std::move(params);
  s.folds = folds;
  return s;
}

std::shared_ptr<const Dataset> car() {
  static const auto ds = std::make_shared<const Dataset>(load_arff(fixtures::uci_dir() / "car.arff"));
  return ds;
}

}  // namespace

TEST_CASE("registry") {
  std::vector<std::string> ids;
  for (const auto& a : list_algorithms()) ids.push_back(a.id);
  CHECK(ids == std::vector<std::string>{"zeror", "oner", "naivebayes", "c45", "reptree", "spaarc", "randomforest",
                                        "sysfor", "forestpa", "kmeans", "farthestfirst", "apriori"});
  REQUIRE(find_algorithm("c45"));
  CHECK(find_algorithm("c45")->family == Family::classifier);
  CHECK(find_algorithm("kmeans")->family == Family::clusterer);
  CHECK(find_algorithm("apriori")->family == Family::associator);
  CHECK(find_algorithm("j48") == nullptr);
  const auto doc = algorithms_document();
  CHECK(doc.size() == ids.size());
  CHECK(doc[0].contains("params"));
}

TEST_CASE("spec validation") {
  const auto w = fixtures::weather();
  const auto r = validate_spec(spec("c45"), w);
  CHECK(r["confidence"] == doctest::Approx(0.25));
  CHECK(r["prune"] == 1.0);
  CHECK(validate_spec(spec("c45", {{"prune", "false"}}), w)["prune"] == 0.0);

  CHECK_THROWS_AS(validate_spec(spec("nope"), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("c45", {{"bogus", "1"}}), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("c45", {{"confidence", "0.9"}}), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("c45", {{"confidence", "abc"}}), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("oner", {{"min_bucket", "1.5"}}), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("c45", {}, 1), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("c45", {}, 15), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("kmeans", {{"k", "15"}}), w), ValidationError);
  CHECK_THROWS_AS(validate_spec(spec("apriori"), fixtures::weather_numeric()), ValidationError);
  auto numeric_class = spec("c45");
  numeric_class.class_index = 1;
  CHECK_THROWS_AS(validate_spec(numeric_class, fixtures::weather_numeric()), ValidationError);

  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"algorithm", "c45"}, {"extra", 1}}), ValidationError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::array()), ValidationError);
  const auto parsed = spec_from_json(
      nlohmann::json{{"algorithm", "c45"}, {"params", {{"confidence", 0.1}}}, {"seed", 3}, {"class_index", "last"}});
  CHECK(parsed.seed == 3);
  CHECK_FALSE(parsed.class_index);
  CHECK(validate_spec(parsed, w)["confidence"] == doctest::Approx(0.1));
}

TEST_CASE("every algorithm runs deterministically with positive timings") {
  const auto w = fixtures::weather();
  for (const auto& a : list_algorithms()) {
    CAPTURE(a.id);
    auto s = spec(a.id, {}, 5);
    const auto d1 = run_algorithm(w, s);
    const auto d2 = run_algorithm(w, s);
    CHECK(without_timings(d1) == without_timings(d2));
    CHECK(d1["build_time_s"].get<double>() > 0);
    CHECK(d1["cv_time_s"].get<double>() > 0);
    CHECK(d1["algorithm"] == a.id);
    CHECK(!d1["model_text"].get<std::string>().empty());
    if (a.family == Family::classifier) {
      CHECK(d1["accuracy"].is_number());
      CHECK(d1["confusion"].size() == 2);
    }
  }
  const auto c = run_algorithm(w, spec("c45"));
  CHECK(c["dataset"]["instances"] == 14);
  std::vector<std::string> keys;
  for (const auto& [k, v] : c.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"algorithm", "params", "seed", "folds", "dataset", "accuracy", "confusion",
                                         "class_labels", "per_class", "build_time_s", "cv_time_s", "model_text"});
}

TEST_CASE("job lifecycle") {
  JobTable jobs;
  const auto id = jobs.start(std::make_shared<const Dataset>(fixtures::weather()), spec("naivebayes"));
  const auto done = jobs.wait(id);
  CHECK(done.status == JobStatus::done);
  CHECK(done.progress == 1.0);
  REQUIRE(done.result);
  CHECK((*done.result)["algorithm"] == "naivebayes");
  CHECK(done.to_json()["status"] == "done");
  // Cancelling a finished job leaves it alone.
  CHECK(jobs.cancel(id).status == JobStatus::done);

  CHECK_THROWS_AS(jobs.poll("run-999"), NotFound);
  CHECK_THROWS_AS(jobs.cancel("run-999"), NotFound);
  CHECK_THROWS_AS(jobs.start(car(), spec("c45", {{"min_leaf", "-1"}})), ValidationError);
}

TEST_CASE("job cancellation and monotone progress") {
  JobTable jobs;
  const auto id = jobs.start(car(), spec("randomforest", {{"num_trees", "60"}}));
  std::vector<double> seen;
  for (int i = 0; i < 50; ++i) {
    const auto s = jobs.poll(id);
    seen.push_back(s.progress);
    if (s.status != JobStatus::pending && s.status != JobStatus::running) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  const auto t0 = std::chrono::steady_clock::now();
  jobs.cancel(id);
  const auto end = jobs.wait(id);
  const double waited = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(end.status == JobStatus::cancelled);
  CHECK_FALSE(end.result);
  CHECK(waited < 2.0);

  // A pure dataset leaves SysFor nothing to split on.
  const auto pure = std::make_shared<const Dataset>(fixtures::weather().subset({2, 3, 4, 6}));
  const auto failing = jobs.wait(jobs.start(pure, spec("sysfor", {}, 2)));
  CHECK(failing.status == JobStatus::failed);
  CHECK(!failing.error.empty());
  CHECK(failing.to_json()["error"] == failing.error);
}
