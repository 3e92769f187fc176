#include "datalearner/engine.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "datalearner/associate.hpp"
#include "datalearner/basic.hpp"
#include "datalearner/cluster.hpp"
#include "datalearner/error.hpp"
#include "datalearner/evaluate.hpp"
#include "datalearner/forest.hpp"
#include "datalearner/tree.hpp"

namespace datalearner {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::classifier: return "classifier";
    case Family::clusterer: return "clusterer";
    case Family::associator: return "associator";
  }
  return "?";
}

std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::integer: return "int";
    case ParamType::real: return "real";
    case ParamType::flag: return "flag";
  }
  return "?";
}

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::cancelled: return "cancelled";
    case JobStatus::failed: return "failed";
  }
  return "?";
}

// ---------------------------------------------------------------- registry

namespace {

constexpr double kBig = 1e6;

ParamSpec int_param(std::string name, double def, double lo, double hi, std::string doc) {
  return {std::move(name), ParamType::integer, def, lo, hi, std::move(doc)};
}
ParamSpec real_param(std::string name, double def, double lo, double hi, std::string doc) {
  return {std::move(name), ParamType::real, def, lo, hi, std::move(doc)};
}
ParamSpec flag_param(std::string name, bool def, std::string doc) {
  return {std::move(name), ParamType::flag, def ? 1.0 : 0.0, 0, 1, std::move(doc)};
}

std::vector<AlgorithmDescriptor> build_registry() {
  const auto num_trees = int_param("num_trees", 10, 1, 1000, "number of member trees");
  const auto min_leaf = int_param("min_leaf", 2, 1, kBig, "minimum instances per leaf");
  const auto confidence = real_param("confidence", 0.25, 1e-6, 0.5, "pruning confidence factor");
  return {
      {"zeror", Family::classifier, "ZeroR", {}},
      {"oner", Family::classifier, "OneR", {int_param("min_bucket", 6, 1, kBig, "minimum bucket size for numeric attributes")}},
      {"naivebayes", Family::classifier, "NaiveBayes", {}},
      {"c45", Family::classifier, "C4.5 (J48)", {confidence, min_leaf, flag_param("prune", true, "apply pessimistic pruning")}},
      {"reptree",
       Family::classifier,
       "REPTree",
       {int_param("prune_folds", 3, 2, 100, "folds; one is held out for pruning"), min_leaf,
        flag_param("prune", true, "apply reduced-error pruning")}},
      {"spaarc",
       Family::classifier,
       "SPAARC",
       {flag_param("split_sampling", true, "cap numeric split points per attribute"),
        int_param("max_points", 20, 2, kBig, "split points evaluated per numeric attribute"),
        flag_param("attr_sampling", true, "evaluate an attribute subset at odd depths"), min_leaf}},
      {"randomforest",
       Family::classifier,
       "RandomForest",
       {num_trees, int_param("subspace", 0, 0, kBig, "attributes per node; 0 = ceil(sqrt(M))")}},
      {"sysfor",
       Family::classifier,
       "SysFor",
       {num_trees, real_param("goodness_threshold", 0.3, 0, 1, "relative gain-ratio margin for good attributes"),
        confidence, min_leaf}},
      {"forestpa",
       Family::classifier,
       "ForestPA",
       {num_trees, int_param("recovery_trees", 3, 1, 1000, "trees for a penalised attribute to recover"), min_leaf}},
      {"kmeans",
       Family::clusterer,
       "SimpleKMeans",
       {int_param("k", 2, 1, kBig, "number of clusters"), int_param("max_iter", 500, 1, kBig, "iteration cap")}},
      {"farthestfirst", Family::clusterer, "FarthestFirst", {int_param("k", 2, 1, kBig, "number of clusters")}},
      {"apriori",
       Family::associator,
       "Apriori",
       {real_param("min_support", 0.1, 1e-9, 1, "minimum itemset support"),
        real_param("min_confidence", 0.9, 1e-9, 1, "minimum rule confidence"),
        int_param("max_rules", 10, 0, kBig, "rules reported; 0 = all")}},
  };
}

Document param_value(const ParamSpec& p, double v) {
  switch (p.type) {
    case ParamType::integer: return static_cast<std::int64_t>(v);
    case ParamType::real: return v;
    case ParamType::flag: return v != 0;
  }
  return nullptr;
}

}  // namespace

const std::vector<AlgorithmDescriptor>& list_algorithms() {
  static const std::vector<AlgorithmDescriptor> registry = build_registry();
  return registry;
}

const AlgorithmDescriptor* find_algorithm(std::string_view id) {
  for (const auto& a : list_algorithms())
    if (a.id == id) return &a;
  return nullptr;
}

Document algorithms_document() {
  Document out = Document::array();
  for (const auto& a : list_algorithms()) {
    Document params = Document::array();
    for (const auto& p : a.params) {
      Document d;
      d["name"] = p.name;
      d["type"] = to_string(p.type);
      d["default"] = param_value(p, p.default_value);
      if (p.type != ParamType::flag) {
        d["min"] = param_value(p, p.min);
        d["max"] = param_value(p, p.max);
      }
      d["description"] = p.description;
      params.push_back(std::move(d));
    }
    Document d;
    d["id"] = a.id;
    d["family"] = to_string(a.family);
    d["title"] = a.title;
    d["params"] = std::move(params);
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------- specs

double ResolvedSpec::operator[](std::string_view name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw std::out_of_range("no parameter " + std::string(name));
}

namespace {

double parse_param(const ParamSpec& p, const std::string& text) {
  auto fail = [&](const std::string& why) -> double {
    throw ValidationError("parameter '" + p.name + "': " + why + " (got '" + text + "')");
  };
  double v = 0;
  switch (p.type) {
    case ParamType::flag:
      if (text == "true" || text == "1" || text == "yes" || text == "on") return 1;
      if (text == "false" || text == "0" || text == "no" || text == "off") return 0;
      return fail("expected true or false");
    case ParamType::integer: {
      long long i = 0;
      const auto* end = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(text.data(), end, i);
      if (ec != std::errc() || ptr != end) return fail("expected an integer");
      v = static_cast<double>(i);
      break;
    }
    case ParamType::real: {
      const auto* end = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(text.data(), end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v)) return fail("expected a number");
      break;
    }
  }
  if (v < p.min || v > p.max) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "out of range [%g, %g]", p.min, p.max);
    return fail(buf);
  }
  return v;
}

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ValidationError("parameter values must be numbers, booleans or strings");
}

std::uint64_t json_unsigned(const nlohmann::json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(std::string(what) + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

AlgorithmSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("spec must be a JSON object");
  AlgorithmSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "algorithm") {
      if (!value.is_string()) throw ValidationError("algorithm must be a string");
      s.algorithm = value.get<std::string>();
    } else if (key == "params") {
      if (!value.is_object()) throw ValidationError("params must be an object");
      for (const auto& [pk, pv] : value.items()) s.params[pk] = json_scalar_text(pv);
    } else if (key == "seed") {
      s.seed = json_unsigned(value, "seed");
    } else if (key == "folds") {
      s.folds = json_unsigned(value, "folds");
    } else if (key == "class_index") {
      if (value.is_string() && value.get<std::string>() == "last")
        s.class_index.reset();
      else
        s.class_index = json_unsigned(value, "class_index");
    } else {
      throw ValidationError("unknown spec field '" + key + "'");
    }
  }
  if (s.algorithm.empty()) throw ValidationError("spec needs an algorithm");
  return s;
}

Dataset apply_class_index(const Dataset& ds, const AlgorithmSpec& spec) {
  if (!spec.class_index) {
    if (ds.num_attributes() == 0) throw ValidationError("dataset has no attributes");
    return set_class_index(ds, ds.num_attributes() - 1);
  }
  return set_class_index(ds, *spec.class_index);
}

ResolvedSpec validate_spec(const AlgorithmSpec& spec, const Dataset& raw) {
  const AlgorithmDescriptor* algo = find_algorithm(spec.algorithm);
  if (!algo) throw ValidationError("unknown algorithm '" + spec.algorithm + "'");
  for (const auto& [name, value] : spec.params) {
    const bool known = std::any_of(algo->params.begin(), algo->params.end(),
                                   [&](const ParamSpec& p) { return p.name == name; });
    if (!known) throw ValidationError("unknown parameter '" + name + "' for algorithm '" + algo->id + "'");
  }
  ResolvedSpec r;
  r.algorithm = algo;
  r.seed = spec.seed;
  r.folds = spec.folds;
  for (const auto& p : algo->params) {
    auto it = spec.params.find(p.name);
    r.values.emplace_back(p.name, it == spec.params.end() ? p.default_value : parse_param(p, it->second));
  }

  const Dataset ds = apply_class_index(raw, spec);
  if (ds.empty()) throw ValidationError("dataset has no instances");
  switch (algo->family) {
    case Family::classifier:
      require_classification_schema(ds);
      if (spec.folds < 2 || spec.folds > ds.size())
        throw ValidationError("folds must lie in [2, " + std::to_string(ds.size()) + "]");
      break;
    case Family::clusterer:
      for (const auto& a : ds.attributes())
        if (a.is_string()) throw ValidationError("string attribute '" + a.name + "' is not supported by this algorithm");
      if (r["k"] > static_cast<double>(ds.size()))
        throw ValidationError("k exceeds the number of instances (" + std::to_string(ds.size()) + ")");
      break;
    case Family::associator:
      for (const auto& a : ds.attributes())
        if (!a.is_nominal())
          throw ValidationError("Apriori needs nominal attributes; '" + a.name + "' is " + std::string(to_string(a.kind)));
      break;
  }
  return r;
}

// ---------------------------------------------------------------- running

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::size_t as_size(double v) { return static_cast<std::size_t>(v); }

struct Built {
  Predictor predict;
  std::function<std::string()> text;
};

template <class Model, class PredictFn, class RenderFn>
Built wrap(Model model, PredictFn predict, RenderFn render) {
  auto m = std::make_shared<const Model>(std::move(model));
  return {[m, predict](const Instance& inst) { return predict(*m, inst); }, [m, render] { return render(*m); }};
}

Built build_classifier(const ResolvedSpec& r, const Dataset& ds, std::uint64_t seed, const RunControl& control) {
  const std::string& id = r.algorithm->id;
  if (id == "zeror") return wrap(train_zero_r(ds), zero_r_predict, render_zero_r);
  if (id == "oner") return wrap(train_one_r(ds, as_size(r["min_bucket"])), one_r_predict, render_one_r);
  if (id == "naivebayes") return wrap(train_naive_bayes(ds), nb_predict, render_naive_bayes);
  if (id == "c45")
    return wrap(train_c45(ds, {r["confidence"], r["min_leaf"], r["prune"] != 0}), tree_predict, render_tree);
  if (id == "reptree")
    return wrap(train_rep_tree(ds, {as_size(r["prune_folds"]), r["min_leaf"], seed, r["prune"] != 0}), tree_predict,
                render_tree);
  if (id == "spaarc")
    return wrap(train_cart_spaarc(ds, {r["split_sampling"] != 0, as_size(r["max_points"]), r["attr_sampling"] != 0,
                                       r["min_leaf"], seed}),
                tree_predict, render_tree);
  if (id == "randomforest")
    return wrap(train_random_forest(ds, {as_size(r["num_trees"]), as_size(r["subspace"]), seed, false}, control),
                forest_predict, render_forest);
  if (id == "sysfor")
    return wrap(train_sysfor(ds, {as_size(r["num_trees"]), r["goodness_threshold"], r["confidence"], r["min_leaf"], seed},
                             control),
                forest_predict, render_forest);
  if (id == "forestpa")
    return wrap(train_forest_pa(ds, {as_size(r["num_trees"]), as_size(r["recovery_trees"]), r["min_leaf"], seed}, control),
                forest_predict, render_forest);
  throw ValidationError("'" + id + "' is not a classifier");
}

Document base_document(const ResolvedSpec& r, const Dataset& ds) {
  Document doc;
  doc["algorithm"] = r.algorithm->id;
  Document params = Document::object();
  for (std::size_t i = 0; i < r.values.size(); ++i)
    params[r.values[i].first] = param_value(r.algorithm->params[i], r.values[i].second);
  doc["params"] = std::move(params);
  doc["seed"] = r.seed;
  doc["folds"] = r.algorithm->family == Family::classifier ? Document(r.folds) : Document(nullptr);
  doc["dataset"] = {{"relation", ds.relation()}, {"instances", ds.size()}, {"attributes", ds.num_attributes()}};
  doc["accuracy"] = nullptr;
  doc["confusion"] = Document::array();
  doc["class_labels"] = Document::array();
  doc["per_class"] = Document::array();
  doc["build_time_s"] = 0.0;
  doc["cv_time_s"] = 0.0;
  doc["model_text"] = "";
  return doc;
}

Document run_classifier(const ResolvedSpec& r, const Dataset& ds, const RunControl& control) {
  Document doc = base_document(r, ds);
  const auto t0 = Clock::now();
  const Built full = build_classifier(r, ds, r.seed, control.scaled(0, 0.1));
  doc["build_time_s"] = seconds_since(t0);
  control.report(0.1);

  Trainer trainer = [&r](const Dataset& train, std::uint64_t seed, const RunControl& c) {
    return build_classifier(r, train, seed, c).predict;
  };
  const CrossValidation cv = cross_validate(ds, trainer, r.folds, r.seed, control.scaled(0.1, 1.0));

  doc["accuracy"] = cv.metrics.accuracy;
  Document cm = Document::array();
  for (const auto& row : cv.confusion.counts) cm.push_back(row);
  doc["confusion"] = std::move(cm);
  doc["class_labels"] = ds.class_attribute().values;
  Document per = Document::array();
  for (std::size_t c = 0; c < cv.metrics.per_class.size(); ++c) {
    const auto& m = cv.metrics.per_class[c];
    per.push_back({{"label", ds.class_attribute().values[c]}, {"precision", m.precision}, {"recall", m.recall},
                   {"f1", m.f1}});
  }
  doc["per_class"] = std::move(per);
  doc["cv_time_s"] = cv.cv_time_s;
  doc["model_text"] = full.text();
  return doc;
}

Document run_clusterer(const ResolvedSpec& r, const Dataset& ds, const RunControl& control) {
  Document doc = base_document(r, ds);
  const auto t0 = Clock::now();
  const ClusterModel m = r.algorithm->id == "kmeans"
                             ? train_kmeans(ds, {as_size(r["k"]), as_size(r["max_iter"]), r.seed}, control.scaled(0, 0.9))
                             : train_farthest_first(ds, {as_size(r["k"]), r.seed}, control.scaled(0, 0.9));
  doc["build_time_s"] = seconds_since(t0);
  control.checkpoint();

  // Evaluation pass: assign the training instances with the built model.
  const auto t1 = Clock::now();
  std::vector<std::size_t> sizes(m.centroids.size(), 0);
  for (const auto& inst : ds.instances()) ++sizes[assign_cluster(m, inst)];
  doc["cv_time_s"] = seconds_since(t1);
  doc["model_text"] = render_clusters(m);
  doc["clusters"] = {{"k", m.centroids.size()}, {"sizes", sizes}, {"score", m.score}, {"iterations", m.iterations}};
  return doc;
}

Document run_associator(const ResolvedSpec& r, const Dataset& ds, const RunControl& control) {
  Document doc = base_document(r, ds);
  const auto t0 = Clock::now();
  const AprioriResult res =
      mine_apriori(ds, {r["min_support"], r["min_confidence"], as_size(r["max_rules"])}, control.scaled(0, 0.9));
  doc["build_time_s"] = seconds_since(t0);
  control.checkpoint();

  // Evaluation pass: recount every reported rule directly against the data.
  const auto t1 = Clock::now();
  auto covers = [&](const Instance& inst, const std::vector<Item>& items) {
    return std::all_of(items.begin(), items.end(), [&](const Item& it) {
      return !inst.missing(it.attribute) && inst.nominal(it.attribute) == it.value;
    });
  };
  auto text = [&](const std::vector<Item>& items) {
    Document out = Document::array();
    for (const auto& it : items)
      out.push_back(ds.attribute(it.attribute).name + "=" + ds.attribute(it.attribute).values[it.value]);
    return out;
  };
  Document rules = Document::array();
  for (const auto& rule : res.rules) {
    std::size_t ante = 0, both = 0;
    for (const auto& inst : ds.instances())
      if (covers(inst, rule.antecedent)) {
        ++ante;
        if (covers(inst, rule.consequent)) ++both;
      }
    if (ante != rule.antecedent_count || both != rule.union_count)
      throw TrainingError("rule counts disagree with a direct recount");
    rules.push_back({{"antecedent", text(rule.antecedent)}, {"consequent", text(rule.consequent)},
                     {"support", rule.support}, {"confidence", rule.confidence}});
  }
  doc["cv_time_s"] = seconds_since(t1);
  doc["model_text"] = render_rules(ds, res);
  doc["association"] = {{"transactions", res.transactions}, {"frequent_itemsets", res.itemsets.size()},
                        {"rules", std::move(rules)}};
  return doc;
}

}  // namespace

Document run_algorithm(const Dataset& raw, const AlgorithmSpec& spec, const RunControl& control) {
  const ResolvedSpec r = validate_spec(spec, raw);
  const Dataset ds = apply_class_index(raw, spec);
  control.checkpoint();
  Document doc;
  switch (r.algorithm->family) {
    case Family::classifier: doc = run_classifier(r, ds, control); break;
    case Family::clusterer: doc = run_clusterer(r, ds, control); break;
    case Family::associator: doc = run_associator(r, ds, control); break;
  }
  control.report(1.0);
  return doc;
}

Document without_timings(Document doc) {
  doc.erase("build_time_s");
  doc.erase("cv_time_s");
  return doc;
}

Document summary_document(const DatasetSummary& s) {
  Document doc;
  doc["relation"] = s.relation;
  doc["instances"] = s.instances;
  doc["attributes"] = s.attributes;
  doc["class_index"] = s.class_index;
  Document attrs = Document::array();
  for (const auto& a : s.per_attribute)
    attrs.push_back({{"name", a.name}, {"kind", to_string(a.kind)}, {"distinct", a.distinct}, {"missing", a.missing}});
  doc["per_attribute"] = std::move(attrs);
  Document dist = Document::object();
  for (const auto& [label, count] : s.class_distribution) dist[label] = count;
  doc["class_distribution"] = std::move(dist);
  return doc;
}

// ---------------------------------------------------------------- jobs

Document JobSnapshot::to_json() const {
  Document d;
  d["id"] = id;
  d["status"] = to_string(status);
  d["progress"] = progress;
  if (result) d["result"] = *result;
  if (!error.empty()) d["error"] = error;
  return d;
}

JobTable::~JobTable() {
  std::vector<std::shared_ptr<Job>> jobs;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, job] : jobs_) {
      job->cancel.store(true, std::memory_order_release);
      jobs.push_back(job);
    }
  }
  for (auto& job : jobs)
    if (job->worker.joinable()) job->worker.join();
}

std::string JobTable::start(std::shared_ptr<const Dataset> ds, const AlgorithmSpec& spec) {
  if (!ds) throw ValidationError("no dataset");
  validate_spec(spec, *ds);
  auto job = std::make_shared<Job>();
  {
    std::lock_guard lock(mutex_);
    job->id = "run-" + std::to_string(next_id_++);
    jobs_[job->id] = job;
  }
  Job* j = job.get();
  job->worker = std::jthread([this, j, ds, spec] {
    {
      std::lock_guard lock(mutex_);
      if (j->cancel.load(std::memory_order_acquire)) {
        j->status = JobStatus::cancelled;
        changed_.notify_all();
        return;
      }
      j->status = JobStatus::running;
    }
    RunControl control(&j->cancel, [j](double f) {
      double cur = j->progress.load();
      // Progress only moves forward and stays below 1 until the job is done.
      const double next = std::min(f, 0.999);
      while (next > cur && !j->progress.compare_exchange_weak(cur, next)) {
      }
    });
    try {
      Document doc = run_algorithm(*ds, spec, control);
      finish(*j, JobStatus::done, std::move(doc), {});
    } catch (const Cancelled&) {
      finish(*j, JobStatus::cancelled, std::nullopt, {});
    } catch (const std::exception& e) {
      finish(*j, JobStatus::failed, std::nullopt, e.what());
    }
  });
  return job->id;
}

void JobTable::finish(Job& job, JobStatus status, std::optional<Document> result, std::string error) {
  std::lock_guard lock(mutex_);
  job.status = status;
  job.result = std::move(result);
  job.error = std::move(error);
  if (status == JobStatus::done) job.progress.store(1.0);
  changed_.notify_all();
}

std::shared_ptr<JobTable::Job> JobTable::find(const std::string& id) const {
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFound("unknown run '" + id + "'");
  return it->second;
}

JobSnapshot JobTable::snapshot(const Job& job) const {
  return {job.id, job.status, job.progress.load(), job.result, job.error};
}

JobSnapshot JobTable::poll(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return snapshot(*find(id));
}

JobSnapshot JobTable::cancel(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto job = find(id);
  if (job->status == JobStatus::pending || job->status == JobStatus::running)
    job->cancel.store(true, std::memory_order_release);
  return snapshot(*job);
}

JobSnapshot JobTable::wait(const std::string& id) const {
  std::unique_lock lock(mutex_);
  auto job = find(id);
  changed_.wait(lock, [&] { return job->status != JobStatus::pending && job->status != JobStatus::running; });
  return snapshot(*job);
}

}  // namespace datalearner
